//! The four Gaussianization-based information measures (total correlation,
//! entropy, KL divergence, mutual information) plus two baseline estimator
//! families for comparison tables: Gaussian moment plug-ins and
//! Kozachenko–Leonenko k-nearest-neighbor estimates.

pub mod expf;
pub mod knn;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::data::DataMatrix;
use crate::error::{RbigError, Result};
use crate::marginal::{marginal_entropy, marginal_kl_to_std_normal};
use crate::model::{fit, RbigConfig};

pub use expf::{expf_entropy, expf_kl, expf_mutual_information, expf_total_correlation};
pub use knn::{knn_entropy, knn_kl, knn_mutual_information, knn_total_correlation, DEFAULT_KNN_K};

/// Which estimator family produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorId {
    Rbig,
    Expf,
    Knn,
}

impl std::fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EstimatorId::Rbig => "rbig",
            EstimatorId::Expf => "expf",
            EstimatorId::Knn => "knn",
        })
    }
}

impl std::str::FromStr for EstimatorId {
    type Err = RbigError;
    fn from_str(s: &str) -> Result<EstimatorId> {
        match s {
            "rbig" => Ok(EstimatorId::Rbig),
            "expf" => Ok(EstimatorId::Expf),
            "knn" => Ok(EstimatorId::Knn),
            other => Err(RbigError::Usage(format!(
                "unknown estimator {other:?} (expected rbig, expf, or knn)"
            ))),
        }
    }
}

/// One estimated measure value with its provenance and cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    /// The estimate, in nats.
    pub value: f64,
    pub estimator_id: EstimatorId,
    /// Gaussianization layers spent (Gaussianization estimates only; for
    /// KL this counts both fits, for MI the final stacked fit).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_layers_used: Option<usize>,
    /// Calibrated per-layer noise floor of the defining fit, in nats
    /// (Gaussianization estimates only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_floor: Option<f64>,
    /// Wall-clock seconds spent producing the value.
    pub wall_time: f64,
}

impl MeasureEstimate {
    pub(crate) fn ensure_finite(self) -> Result<MeasureEstimate> {
        if !self.value.is_finite() {
            return Err(RbigError::Numeric(format!(
                "{} estimate is not finite: {}",
                self.estimator_id, self.value
            )));
        }
        Ok(self)
    }
}

/// Total correlation (multi-information) of the sample's distribution:
/// the redundancy removed by a full Gaussianization fit, summed across
/// layers.
pub fn estimate_total_correlation(data: &DataMatrix, config: &RbigConfig) -> Result<MeasureEstimate> {
    let t0 = Instant::now();
    let model = fit(data, config)?;
    MeasureEstimate {
        value: model.total_correlation(),
        estimator_id: EstimatorId::Rbig,
        n_layers_used: Some(model.layers.len()),
        noise_floor: Some(model.noise_floor),
        wall_time: t0.elapsed().as_secs_f64(),
    }
    .ensure_finite()
}

/// Joint differential entropy via the marginal decomposition
/// H(x) = Σ_i H(x_i) − T(x): univariate entropies of the raw columns minus
/// the fitted total correlation, so every multivariate quantity reduces to
/// marginal computations.
pub fn estimate_entropy(data: &DataMatrix, config: &RbigConfig) -> Result<MeasureEstimate> {
    let t0 = Instant::now();
    let mut marginal_sum = 0.0;
    for j in 0..data.dims() {
        let col = data.column_vec(j);
        marginal_sum += marginal_entropy(&col, config.entropy_estimator, None)?;
    }
    let model = fit(data, config)?;
    MeasureEstimate {
        value: marginal_sum - model.total_correlation(),
        estimator_id: EstimatorId::Rbig,
        n_layers_used: Some(model.layers.len()),
        noise_floor: Some(model.noise_floor),
        wall_time: t0.elapsed().as_secs_f64(),
    }
    .ensure_finite()
}

/// KL divergence of y's distribution FROM x's distribution, D(P_y ‖ P_x):
/// fit a Gaussianizer on x, push y through it, and measure the transformed
/// sample's departure from N(0, I) — its total correlation (via a second
/// fit) plus each coordinate's marginal divergence from the standard
/// normal. Invertibility of the transform makes this equal to the original
/// divergence. Clamped below at zero.
///
/// The reported layer count covers both fits; the noise floor is the
/// second (departure-measuring) fit's.
pub fn estimate_kl(
    y_data: &DataMatrix,
    x_data: &DataMatrix,
    config: &RbigConfig,
) -> Result<MeasureEstimate> {
    if y_data.dims() != x_data.dims() {
        return Err(RbigError::Data(format!(
            "dimension mismatch: y has {} columns, x has {}",
            y_data.dims(),
            x_data.dims()
        )));
    }
    let t0 = Instant::now();
    let model_x = fit(x_data, config)?;
    let y_prime = model_x.transform(y_data)?;
    let model_y = fit(&y_prime, config)?;
    let mut marginal_sum = 0.0;
    for j in 0..y_prime.dims() {
        let col = y_prime.column_vec(j);
        marginal_sum += marginal_kl_to_std_normal(&col, config.entropy_estimator, None)?;
    }
    let value = (model_y.total_correlation() + marginal_sum).max(0.0);
    MeasureEstimate {
        value,
        estimator_id: EstimatorId::Rbig,
        n_layers_used: Some(model_x.layers.len() + model_y.layers.len()),
        noise_floor: Some(model_y.noise_floor),
        wall_time: t0.elapsed().as_secs_f64(),
    }
    .ensure_finite()
}

/// Mutual information between two variables (possibly of different
/// dimension): Gaussianize each variable separately, stack the transformed
/// columns, and estimate the total correlation remaining between them.
/// Whatever redundancy survives the per-variable fits is exactly the
/// cross-variable dependence.
pub fn estimate_mutual_information(
    x_data: &DataMatrix,
    y_data: &DataMatrix,
    config: &RbigConfig,
) -> Result<MeasureEstimate> {
    if x_data.n_samples() != y_data.n_samples() {
        return Err(RbigError::Data(format!(
            "row-count mismatch: x has {} samples, y has {}",
            x_data.n_samples(),
            y_data.n_samples()
        )));
    }
    let t0 = Instant::now();
    let model_x = fit(x_data, config)?;
    let model_y = fit(y_data, config)?;
    let x_prime = model_x.transform(x_data)?;
    let y_prime = model_y.transform(y_data)?;
    let stacked = x_prime.hstack(&y_prime)?;
    let model_z = fit(&stacked, config)?;
    MeasureEstimate {
        value: model_z.total_correlation(),
        estimator_id: EstimatorId::Rbig,
        n_layers_used: Some(model_z.layers.len()),
        noise_floor: Some(model_z.noise_floor),
        wall_time: t0.elapsed().as_secs_f64(),
    }
    .ensure_finite()
}

/// Diagnostic-only mutual information via the three-entropy identity
/// I(x; y) = H(x) + H(y) − H([x, y]). Each entropy carries its own
/// estimation error, so this route is noisier than
/// [`estimate_mutual_information`] and is exposed for cross-checking, not
/// benchmarking.
pub fn mi_three_entropy_diagnostic(
    x_data: &DataMatrix,
    y_data: &DataMatrix,
    config: &RbigConfig,
) -> Result<MeasureEstimate> {
    let t0 = Instant::now();
    let h_x = estimate_entropy(x_data, config)?;
    let h_y = estimate_entropy(y_data, config)?;
    let joint = x_data.hstack(y_data)?;
    let h_xy = estimate_entropy(&joint, config)?;
    MeasureEstimate {
        value: h_x.value + h_y.value - h_xy.value,
        estimator_id: EstimatorId::Rbig,
        n_layers_used: h_xy.n_layers_used,
        noise_floor: h_xy.noise_floor,
        wall_time: t0.elapsed().as_secs_f64(),
    }
    .ensure_finite()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::HALF_LN_2PI_E;
    use crate::synth::{sample_gaussian_random_cov, Measure};
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;
    use rand_distr::StandardNormal;

    fn uniform_matrix(n: usize, d: usize, seed: u64) -> DataMatrix {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        DataMatrix::from_matrix(DMatrix::from_fn(n, d, |_, _| rng.gen::<f64>()))
    }

    fn normal_matrix(n: usize, d: usize, seed: u64) -> DataMatrix {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        DataMatrix::from_matrix(DMatrix::from_fn(n, d, |_, _| {
            rng.sample::<f64, _>(StandardNormal)
        }))
    }

    #[test]
    fn tc_of_independent_uniforms_is_within_noise() {
        let data = uniform_matrix(10_000, 5, 101);
        let est = estimate_total_correlation(&data, &RbigConfig::default()).unwrap();
        let floor = est.noise_floor.unwrap();
        assert!(
            est.value.abs() <= (3.0 * floor).max(0.03),
            "tc = {}, floor = {floor}",
            est.value
        );
        assert_eq!(est.estimator_id, EstimatorId::Rbig);
        assert!(est.wall_time >= 0.0);
    }

    #[test]
    fn entropy_of_standard_gaussian_matches_closed_form() {
        let data = normal_matrix(100_000, 3, 7);
        let est = estimate_entropy(&data, &RbigConfig::default()).unwrap();
        let want = 3.0 * HALF_LN_2PI_E; // 4.2568...
        assert!(
            (est.value - want).abs() < 0.1,
            "H = {}, want {want}",
            est.value
        );
    }

    #[test]
    fn tc_of_correlated_gaussian_tracks_truth() {
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let (data, truths) = sample_gaussian_random_cov(3, 10_000, &mut rng).unwrap();
        let truth = truths.spec_for(Measure::Tc).unwrap().truth;
        let est = estimate_total_correlation(&data, &RbigConfig::default()).unwrap();
        let rel = (est.value - truth).abs() / truth;
        assert!(rel < 0.10, "tc = {}, truth = {truth}, rel = {rel}", est.value);
    }

    #[test]
    fn kl_of_identical_samples_is_near_zero() {
        // Split halves of one Gaussian draw: true divergence is zero.
        let all = normal_matrix(20_000, 5, 55);
        let x = DataMatrix::from_matrix(all.0.view((0, 0), (10_000, 5)).into_owned());
        let y = DataMatrix::from_matrix(all.0.view((10_000, 0), (10_000, 5)).into_owned());
        let est = estimate_kl(&y, &x, &RbigConfig::default()).unwrap();
        let floor = est.noise_floor.unwrap();
        assert!(
            est.value <= 0.1 + 6.0 * floor,
            "kl = {}, floor = {floor}",
            est.value
        );
        assert!(est.value >= 0.0);
    }

    #[test]
    fn kl_rejects_dimension_mismatch() {
        let x = normal_matrix(200, 3, 1);
        let y = normal_matrix(200, 2, 2);
        assert!(matches!(
            estimate_kl(&y, &x, &RbigConfig::default()),
            Err(RbigError::Data(_))
        ));
    }

    #[test]
    fn mi_of_independent_variables_is_within_noise() {
        let x = normal_matrix(10_000, 3, 11);
        let y = normal_matrix(10_000, 3, 12);
        let est = estimate_mutual_information(&x, &y, &RbigConfig::default()).unwrap();
        let floor = est.noise_floor.unwrap();
        assert!(
            est.value.abs() <= (3.0 * floor).max(0.03),
            "mi = {}, floor = {floor}",
            est.value
        );
    }

    #[test]
    fn mi_of_correlated_1d_pair_matches_closed_form() {
        // x ~ N(0,1), y = rho·x + sqrt(1−rho²)·e: I = −½ ln(1−rho²).
        let rho = 0.9f64;
        let n = 100_000;
        let mut rng = ChaCha12Rng::seed_from_u64(33);
        let mut xs = Vec::with_capacity(n);
        let mut ys = Vec::with_capacity(n);
        for _ in 0..n {
            let a: f64 = rng.sample(StandardNormal);
            let e: f64 = rng.sample(StandardNormal);
            xs.push(a);
            ys.push(rho * a + (1.0 - rho * rho).sqrt() * e);
        }
        let x = DataMatrix::from_row_major(n, 1, &xs).unwrap();
        let y = DataMatrix::from_row_major(n, 1, &ys).unwrap();
        let est = estimate_mutual_information(&x, &y, &RbigConfig::default()).unwrap();
        let want = -0.5 * (1.0 - rho * rho).ln(); // 0.8304
        assert!(
            (est.value - want).abs() < 0.06,
            "mi = {}, want {want}",
            est.value
        );
    }

    #[test]
    fn mi_rejects_row_count_mismatch() {
        let x = normal_matrix(200, 2, 1);
        let y = normal_matrix(300, 2, 2);
        assert!(matches!(
            estimate_mutual_information(&x, &y, &RbigConfig::default()),
            Err(RbigError::Data(_))
        ));
    }

    #[test]
    fn mi_agrees_with_tc_for_a_2d_split() {
        // T([x1, x2]) = I(x1; x2) for a 2D dataset.
        let rho = 0.6f64;
        let n = 20_000;
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        let mut joint = DMatrix::zeros(n, 2);
        for i in 0..n {
            let a: f64 = rng.sample(StandardNormal);
            let e: f64 = rng.sample(StandardNormal);
            joint[(i, 0)] = a;
            joint[(i, 1)] = rho * a + (1.0 - rho * rho).sqrt() * e;
        }
        let data = DataMatrix::from_matrix(joint.clone());
        let x = DataMatrix::from_matrix(joint.view((0, 0), (n, 1)).into_owned());
        let y = DataMatrix::from_matrix(joint.view((0, 1), (n, 1)).into_owned());
        let cfg = RbigConfig::default();
        let t = estimate_total_correlation(&data, &cfg).unwrap();
        let i = estimate_mutual_information(&x, &y, &cfg).unwrap();
        let tol = 3.0 * t.noise_floor.unwrap().max(0.015);
        assert!(
            (t.value - i.value).abs() <= tol + 0.05,
            "t = {}, i = {}",
            t.value,
            i.value
        );
    }

    #[test]
    fn mi_is_symmetric_within_noise() {
        let n = 10_000;
        let mut rng = ChaCha12Rng::seed_from_u64(88);
        let mut joint = DMatrix::zeros(n, 4);
        for i in 0..n {
            let a: f64 = rng.sample(StandardNormal);
            for j in 0..4 {
                let e: f64 = rng.sample(StandardNormal);
                joint[(i, j)] = 0.7 * a + e;
            }
        }
        let x = DataMatrix::from_matrix(joint.view((0, 0), (n, 2)).into_owned());
        let y = DataMatrix::from_matrix(joint.view((0, 2), (n, 2)).into_owned());
        let cfg = RbigConfig::default();
        let ab = estimate_mutual_information(&x, &y, &cfg).unwrap();
        let ba = estimate_mutual_information(&y, &x, &cfg).unwrap();
        let tol = 3.0 * ab.noise_floor.unwrap().max(0.01);
        assert!(
            (ab.value - ba.value).abs() <= tol + 0.05,
            "xy = {}, yx = {}",
            ab.value,
            ba.value
        );
    }

    #[test]
    fn mi_is_invariant_under_monotone_reparametrization() {
        let n = 10_000;
        let mut rng = ChaCha12Rng::seed_from_u64(91);
        let mut xs = Vec::with_capacity(n);
        let mut ys = Vec::with_capacity(n);
        for _ in 0..n {
            let a: f64 = rng.sample(StandardNormal);
            let e: f64 = rng.sample(StandardNormal);
            xs.push(a);
            ys.push(0.8 * a + 0.6 * e);
        }
        let x = DataMatrix::from_row_major(n, 1, &xs).unwrap();
        let y = DataMatrix::from_row_major(n, 1, &ys).unwrap();
        // exp is strictly monotone; MI must not change materially.
        let warped: Vec<f64> = xs.iter().map(|v| v.exp()).collect();
        let xw = DataMatrix::from_row_major(n, 1, &warped).unwrap();
        let cfg = RbigConfig::default();
        let a = estimate_mutual_information(&x, &y, &cfg).unwrap();
        let b = estimate_mutual_information(&xw, &y, &cfg).unwrap();
        let tol = 3.0 * a.noise_floor.unwrap().max(0.01);
        assert!(
            (a.value - b.value).abs() <= tol + 0.05,
            "raw = {}, warped = {}",
            a.value,
            b.value
        );
    }

    #[test]
    fn three_entropy_diagnostic_is_in_the_right_neighborhood() {
        let rho = 0.8f64;
        let n = 20_000;
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        let mut xs = Vec::with_capacity(n);
        let mut ys = Vec::with_capacity(n);
        for _ in 0..n {
            let a: f64 = rng.sample(StandardNormal);
            let e: f64 = rng.sample(StandardNormal);
            xs.push(a);
            ys.push(rho * a + (1.0 - rho * rho).sqrt() * e);
        }
        let x = DataMatrix::from_row_major(n, 1, &xs).unwrap();
        let y = DataMatrix::from_row_major(n, 1, &ys).unwrap();
        let est = mi_three_entropy_diagnostic(&x, &y, &RbigConfig::default()).unwrap();
        let want = -0.5 * (1.0 - rho * rho).ln();
        assert!(
            (est.value - want).abs() < 0.15,
            "diag mi = {}, want {want}",
            est.value
        );
    }

    #[test]
    fn estimator_tokens_round_trip() {
        for (e, s) in [
            (EstimatorId::Rbig, "rbig"),
            (EstimatorId::Expf, "expf"),
            (EstimatorId::Knn, "knn"),
        ] {
            assert_eq!(e.to_string(), s);
            assert_eq!(s.parse::<EstimatorId>().unwrap(), e);
        }
        assert!("gauss".parse::<EstimatorId>().is_err());
    }
}
