//! Univariate building blocks: empirical-CDF Gaussianization maps
//! (fit, apply, invert) and univariate entropy and KL-to-standard-normal
//! estimators. All the statistical estimation the iterative scheme
//! performs lives here.

use serde::{Deserialize, Serialize};

use crate::error::{RbigError, Result};
use crate::special::{std_normal_cdf, std_normal_quantile, LN_2PI};

/// Piecewise-linear empirical CDF composed with the standard normal
/// quantile. Knots are the sorted unique sample values with mid-rank
/// plotting positions; evaluation clamps probabilities into
/// [clamp_eps, 1 − clamp_eps] so every output stays finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalMap {
    knots_x: Vec<f64>,
    knots_p: Vec<f64>,
    clamp_eps: f64,
    /// dCDF/dx used for inputs below the smallest knot.
    slope_low: f64,
    /// dCDF/dx used for inputs above the largest knot.
    slope_high: f64,
}

/// Univariate differential-entropy estimator choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyEstimator {
    /// Equal-width histogram with Miller–Madow correction (default).
    HistogramMm,
    /// Vasicek m-spacing estimator with Ebrahimi edge weights.
    Spacing,
}

impl Default for EntropyEstimator {
    fn default() -> Self {
        EntropyEstimator::HistogramMm
    }
}

/// Fits the empirical-CDF map: sorted unique knots, mid-rank plotting
/// positions (rank − 0.5)/N, ties collapsed to one knot carrying the
/// averaged position, probability clamp ε = 1/(2N).
pub fn fit_marginal_map(values: &[f64]) -> Result<MarginalMap> {
    let n = values.len();
    if n < 2 {
        return Err(RbigError::Data(format!(
            "marginal fit needs at least 2 values, got {n}"
        )));
    }
    let mut sorted = Vec::with_capacity(n);
    for &v in values {
        if !v.is_finite() {
            return Err(RbigError::Data(format!("non-finite value {v} in marginal")));
        }
        sorted.push(v);
    }
    sorted.sort_unstable_by(f64::total_cmp);

    let nf = n as f64;
    let mut knots_x = Vec::new();
    let mut knots_p = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        // Mid-rank plotting position averaged over the tie run i..=j.
        knots_x.push(sorted[i]);
        knots_p.push(((i + j) as f64 / 2.0 + 0.5) / nf);
        i = j + 1;
    }
    if knots_x.len() < 2 {
        return Err(RbigError::DegenerateMarginal(
            "fewer than two distinct values (constant column)".into(),
        ));
    }

    let m = knots_x.len();
    let slope_low = (knots_p[1] - knots_p[0]) / (knots_x[1] - knots_x[0]);
    let slope_high = (knots_p[m - 1] - knots_p[m - 2]) / (knots_x[m - 1] - knots_x[m - 2]);
    Ok(MarginalMap {
        knots_x,
        knots_p,
        clamp_eps: 0.5 / nf,
        slope_low,
        slope_high,
    })
}

impl MarginalMap {
    pub fn clamp_eps(&self) -> f64 {
        self.clamp_eps
    }

    pub fn knots_x(&self) -> &[f64] {
        &self.knots_x
    }

    pub fn knots_p(&self) -> &[f64] {
        &self.knots_p
    }

    pub fn slope_low(&self) -> f64 {
        self.slope_low
    }

    pub fn slope_high(&self) -> f64 {
        self.slope_high
    }

    /// Rebuilds a map from persisted parts, validating monotonicity.
    pub fn from_parts(
        knots_x: Vec<f64>,
        knots_p: Vec<f64>,
        clamp_eps: f64,
        slope_low: f64,
        slope_high: f64,
    ) -> Result<MarginalMap> {
        if knots_x.len() != knots_p.len() || knots_x.len() < 2 {
            return Err(RbigError::ModelValidation(
                "marginal map needs matching knot arrays of length >= 2".into(),
            ));
        }
        if !(clamp_eps > 0.0 && clamp_eps < 0.5) {
            return Err(RbigError::ModelValidation(format!(
                "clamp_eps {clamp_eps} outside (0, 0.5)"
            )));
        }
        for w in knots_x.windows(2) {
            if !(w[1] > w[0]) || !w[0].is_finite() || !w[1].is_finite() {
                return Err(RbigError::ModelValidation(
                    "knots_x not strictly increasing and finite".into(),
                ));
            }
        }
        for w in knots_p.windows(2) {
            if !(w[1] > w[0]) {
                return Err(RbigError::ModelValidation(
                    "knots_p not strictly increasing".into(),
                ));
            }
        }
        let m = knots_p.len();
        if knots_p[0] <= 0.0 || knots_p[m - 1] >= 1.0 {
            return Err(RbigError::ModelValidation(
                "knots_p outside (0, 1)".into(),
            ));
        }
        if !(slope_low > 0.0 && slope_high > 0.0) {
            return Err(RbigError::ModelValidation(
                "extrapolation slopes must be positive".into(),
            ));
        }
        Ok(MarginalMap {
            knots_x,
            knots_p,
            clamp_eps,
            slope_low,
            slope_high,
        })
    }

    /// Empirical CDF: linear between knots, linear-in-probability beyond
    /// them, clamped into [ε, 1−ε]. Monotone non-decreasing in v.
    fn cdf(&self, v: f64) -> f64 {
        let xs = &self.knots_x;
        let ps = &self.knots_p;
        let m = xs.len();
        let p = if v < xs[0] {
            ps[0] + (v - xs[0]) * self.slope_low
        } else if v > xs[m - 1] {
            ps[m - 1] + (v - xs[m - 1]) * self.slope_high
        } else {
            let hi = xs.partition_point(|&k| k <= v);
            if hi == m {
                ps[m - 1]
            } else {
                let i = hi - 1;
                if xs[i] == v {
                    ps[i]
                } else {
                    let t = ps[i] + (v - xs[i]) * (ps[i + 1] - ps[i]) / (xs[i + 1] - xs[i]);
                    t.clamp(ps[i], ps[i + 1])
                }
            }
        };
        p.clamp(self.clamp_eps, 1.0 - self.clamp_eps)
    }

    /// Inverse of [`MarginalMap::cdf`] on the non-clamped range; clamped
    /// probabilities map to the boundary pre-image.
    fn cdf_inverse(&self, p_raw: f64) -> f64 {
        let xs = &self.knots_x;
        let ps = &self.knots_p;
        let m = xs.len();
        let p = p_raw.clamp(self.clamp_eps, 1.0 - self.clamp_eps);
        if p < ps[0] {
            xs[0] + (p - ps[0]) / self.slope_low
        } else if p > ps[m - 1] {
            xs[m - 1] + (p - ps[m - 1]) / self.slope_high
        } else {
            let hi = ps.partition_point(|&q| q <= p);
            if hi == m {
                xs[m - 1]
            } else {
                let i = hi - 1;
                if ps[i] == p {
                    xs[i]
                } else {
                    let x = xs[i] + (p - ps[i]) * (xs[i + 1] - xs[i]) / (ps[i + 1] - ps[i]);
                    x.clamp(xs[i], xs[i + 1])
                }
            }
        }
    }

    /// Single-value forward transform v → Φ⁻¹(CDF̂(v)).
    pub fn forward_one(&self, v: f64) -> Result<f64> {
        if !v.is_finite() {
            return Err(RbigError::Data(format!(
                "non-finite input {v} to forward transform"
            )));
        }
        std_normal_quantile(self.cdf(v))
    }

    /// Single-value inverse transform z → CDF̂⁻¹(Φ(z)).
    pub fn inverse_one(&self, z: f64) -> Result<f64> {
        if !z.is_finite() {
            return Err(RbigError::Data(format!(
                "non-finite input {z} to inverse transform"
            )));
        }
        Ok(self.cdf_inverse(std_normal_cdf(z)?))
    }
}

/// Forward Gaussianization of a batch of values through a fitted map.
pub fn gaussianize_forward(map: &MarginalMap, values: &[f64]) -> Result<Vec<f64>> {
    values.iter().map(|&v| map.forward_one(v)).collect()
}

/// Inverse Gaussianization of a batch of values.
pub fn gaussianize_inverse(map: &MarginalMap, values: &[f64]) -> Result<Vec<f64>> {
    values.iter().map(|&z| map.inverse_one(z)).collect()
}

/// Differential entropy of a univariate sample, in nats.
///
/// `bins` overrides the histogram's default ceil(√N) bin count and is
/// ignored by the spacing estimator.
pub fn marginal_entropy(
    values: &[f64],
    estimator: EntropyEstimator,
    bins: Option<usize>,
) -> Result<f64> {
    let n = values.len();
    if n < 8 {
        return Err(RbigError::Data(format!(
            "entropy estimation needs at least 8 values, got {n}"
        )));
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        if !v.is_finite() {
            return Err(RbigError::Data(format!("non-finite value {v} in sample")));
        }
        min = min.min(v);
        max = max.max(v);
    }
    if !(max > min) {
        return Err(RbigError::DegenerateMarginal(
            "zero-range sample (entropy -inf)".into(),
        ));
    }
    match estimator {
        EntropyEstimator::HistogramMm => histogram_mm_entropy(values, min, max, bins),
        EntropyEstimator::Spacing => spacing_entropy(values, min, max),
    }
}

fn histogram_mm_entropy(values: &[f64], min: f64, max: f64, bins: Option<usize>) -> Result<f64> {
    let n = values.len();
    let b = bins
        .unwrap_or_else(|| (n as f64).sqrt().ceil() as usize)
        .max(1);
    let width = (max - min) / b as f64;
    let mut counts = vec![0u64; b];
    for &v in values {
        let idx = (((v - min) / width) as usize).min(b - 1);
        counts[idx] += 1;
    }
    let nf = n as f64;
    let mut plugin = 0.0;
    let mut occupied = 0u64;
    for &c in &counts {
        if c > 0 {
            occupied += 1;
            let p = c as f64 / nf;
            plugin -= p * p.ln();
        }
    }
    Ok(plugin + (occupied as f64 - 1.0) / (2.0 * nf) + width.ln())
}

fn spacing_entropy(values: &[f64], min: f64, max: f64) -> Result<f64> {
    let n = values.len();
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let m = ((n as f64).sqrt().floor() as usize).max(1);
    let nf = n as f64;
    let mf = m as f64;
    // Tied neighbors produce zero spacings; clamp them to a sliver of the
    // range so the log stays finite.
    let gap_floor = (max - min) * 1e-12;
    let mut clamped = 0usize;
    let mut sum = 0.0;
    for i in 0..n {
        let lo = i.saturating_sub(m);
        let hi = (i + m).min(n - 1);
        // Ebrahimi edge weights: interior windows span 2m quantile steps,
        // truncated windows proportionally fewer.
        let c = if i < m {
            1.0 + i as f64 / mf
        } else if i + m > n - 1 {
            1.0 + (n - 1 - i) as f64 / mf
        } else {
            2.0
        };
        let mut gap = sorted[hi] - sorted[lo];
        if gap <= 0.0 {
            gap = gap_floor;
            clamped += 1;
        }
        sum += (nf * gap / (c * mf)).ln();
    }
    if clamped > 0 {
        log::warn!("spacing entropy clamped {clamped} zero spacings (tied values)");
    }
    Ok(sum / nf)
}

/// KL divergence of the sample's distribution from N(0,1):
/// −Ĥ + ½·mean(v²) + ½·ln(2π), clamped below at zero.
pub fn marginal_kl_to_std_normal(
    values: &[f64],
    estimator: EntropyEstimator,
    bins: Option<usize>,
) -> Result<f64> {
    let h = marginal_entropy(values, estimator, bins)?;
    let mean_sq = values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64;
    Ok((-h + 0.5 * mean_sq + 0.5 * LN_2PI).max(0.0))
}
