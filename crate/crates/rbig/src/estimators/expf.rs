//! Gaussian moment plug-in baseline: fit a Gaussian by sample mean and
//! covariance, then read every measure off the closed forms. Exact when the
//! data really is Gaussian; systematically wrong otherwise, which is what
//! the comparison tables are meant to show.

use std::time::Instant;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::data::DataMatrix;
use crate::error::{RbigError, Result};
use crate::special::HALF_LN_2PI_E;
use crate::synth::gaussian_kl;

use super::{EstimatorId, MeasureEstimate};

/// Ridge added to a covariance that fails Cholesky, relative to its mean
/// diagonal: 1e-10 · trace/D.
const RIDGE_REL: f64 = 1e-10;

fn sample_mean_cov(data: &DataMatrix) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let n = data.n_samples();
    let d = data.dims();
    if n < 2 {
        return Err(RbigError::Data(format!(
            "moment estimation needs at least 2 samples, got {n}"
        )));
    }
    data.ensure_finite()?;
    let mean = DVector::from_iterator(d, (0..d).map(|j| data.0.column(j).sum() / n as f64));
    let mut centered = data.0.clone();
    for j in 0..d {
        for i in 0..n {
            centered[(i, j)] -= mean[j];
        }
    }
    let cov = centered.transpose() * &centered / (n as f64 - 1.0);
    Ok((mean, cov))
}

/// Cholesky of the covariance, adding the relative ridge once if the plain
/// factorization fails. Returns the (possibly ridged) covariance, its
/// factor, and its log determinant.
fn factor_with_ridge(cov: DMatrix<f64>) -> Result<(DMatrix<f64>, Cholesky<f64, Dyn>, f64)> {
    let d = cov.nrows();
    let attempt = Cholesky::new(cov.clone());
    let (cov, chol) = match attempt {
        Some(c) => (cov, c),
        None => {
            let ridge = RIDGE_REL * cov.trace() / d as f64;
            let ridged = &cov + DMatrix::identity(d, d).scale(ridge);
            let chol = Cholesky::new(ridged.clone()).ok_or_else(|| {
                RbigError::Numeric(format!(
                    "sample covariance singular even after ridge {ridge:.3e}"
                ))
            })?;
            (ridged, chol)
        }
    };
    let l = chol.l_dirty();
    let ln_det = (0..d).map(|i| l[(i, i)].ln()).sum::<f64>() * 2.0;
    Ok((cov, chol, ln_det))
}

fn finish(value: f64, t0: Instant) -> Result<MeasureEstimate> {
    MeasureEstimate {
        value,
        estimator_id: EstimatorId::Expf,
        n_layers_used: None,
        noise_floor: None,
        wall_time: t0.elapsed().as_secs_f64(),
    }
    .ensure_finite()
}

/// Gaussian plug-in entropy: (D/2)·ln(2πe) + ½·ln|Σ̂|.
pub fn expf_entropy(data: &DataMatrix) -> Result<MeasureEstimate> {
    let t0 = Instant::now();
    let (_, cov) = sample_mean_cov(data)?;
    let (_, _, ln_det) = factor_with_ridge(cov)?;
    finish(data.dims() as f64 * HALF_LN_2PI_E + 0.5 * ln_det, t0)
}

/// Gaussian plug-in total correlation: Σ ln σ̂_i − ½·ln|Σ̂|.
pub fn expf_total_correlation(data: &DataMatrix) -> Result<MeasureEstimate> {
    let t0 = Instant::now();
    let (_, cov) = sample_mean_cov(data)?;
    let sum_ln_sigma: f64 = (0..data.dims()).map(|i| 0.5 * cov[(i, i)].ln()).sum();
    let (_, _, ln_det) = factor_with_ridge(cov)?;
    finish(sum_ln_sigma - 0.5 * ln_det, t0)
}

/// Gaussian plug-in KL divergence of y's fitted Gaussian from x's fitted
/// Gaussian (same argument order as the Gaussianization-based estimator).
pub fn expf_kl(y_data: &DataMatrix, x_data: &DataMatrix) -> Result<MeasureEstimate> {
    if y_data.dims() != x_data.dims() {
        return Err(RbigError::Data(format!(
            "dimension mismatch: y has {} columns, x has {}",
            y_data.dims(),
            x_data.dims()
        )));
    }
    let t0 = Instant::now();
    let (mean_y, cov_y) = sample_mean_cov(y_data)?;
    let (mean_x, cov_x) = sample_mean_cov(x_data)?;
    let (cov_y, _, _) = factor_with_ridge(cov_y)?;
    let (cov_x, _, _) = factor_with_ridge(cov_x)?;
    let value = gaussian_kl(
        mean_y.as_slice(),
        &cov_y,
        mean_x.as_slice(),
        &cov_x,
    )?;
    finish(value.max(0.0), t0)
}

/// Gaussian plug-in mutual information: ½·ln(|Σ̂_x|·|Σ̂_y| / |Σ̂_xy|).
pub fn expf_mutual_information(
    x_data: &DataMatrix,
    y_data: &DataMatrix,
) -> Result<MeasureEstimate> {
    if x_data.n_samples() != y_data.n_samples() {
        return Err(RbigError::Data(format!(
            "row-count mismatch: x has {} samples, y has {}",
            x_data.n_samples(),
            y_data.n_samples()
        )));
    }
    let t0 = Instant::now();
    let joint = x_data.hstack(y_data)?;
    let (_, cov_x) = sample_mean_cov(x_data)?;
    let (_, cov_y) = sample_mean_cov(y_data)?;
    let (_, cov_xy) = sample_mean_cov(&joint)?;
    let (_, _, ln_det_x) = factor_with_ridge(cov_x)?;
    let (_, _, ln_det_y) = factor_with_ridge(cov_y)?;
    let (_, _, ln_det_xy) = factor_with_ridge(cov_xy)?;
    finish(0.5 * (ln_det_x + ln_det_y - ln_det_xy), t0)
}
