//! Synthetic-distribution samplers with analytic (or semi-analytic)
//! ground-truth measure values: random-covariance Gaussians, linearly mixed
//! uniforms, elliptical Student-t families, and the paired constructions
//! used for KL-divergence and mutual-information benchmarks.

use nalgebra::{Cholesky, DMatrix, Dyn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::DataMatrix;
use crate::error::{RbigError, Result};
use crate::quad::gauss_legendre;
use crate::special::{digamma, log_beta, log_gamma, HALF_LN_2PI_E};

/// Which information measure a ground truth refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// Total correlation (multi-information).
    Tc,
    /// Differential entropy.
    H,
    /// Kullback-Leibler divergence.
    Kl,
    /// Mutual information.
    Mi,
}

impl std::fmt::Display for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Measure::Tc => "tc",
            Measure::H => "h",
            Measure::Kl => "kl",
            Measure::Mi => "mi",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Measure {
    type Err = RbigError;
    fn from_str(s: &str) -> Result<Measure> {
        match s {
            "tc" => Ok(Measure::Tc),
            "h" => Ok(Measure::H),
            "kl" => Ok(Measure::Kl),
            "mi" => Ok(Measure::Mi),
            other => Err(RbigError::Usage(format!(
                "unknown measure {other:?} (expected tc, h, kl, or mi)"
            ))),
        }
    }
}

/// Synthetic family identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    GaussianRandomCov,
    RotatedUniform,
    Student,
    GaussianPairMean,
    GaussianPairCov,
    GaussianVsStudent,
    StudentVsStudent,
    GaussianPairMi,
    StudentPairMi,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Family::GaussianRandomCov => "gaussian_random_cov",
            Family::RotatedUniform => "rotated_uniform",
            Family::Student => "student",
            Family::GaussianPairMean => "gaussian_pair_mean",
            Family::GaussianPairCov => "gaussian_pair_cov",
            Family::GaussianVsStudent => "gaussian_vs_student",
            Family::StudentVsStudent => "student_vs_student",
            Family::GaussianPairMi => "gaussian_pair_mi",
            Family::StudentPairMi => "student_pair_mi",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Family {
    type Err = RbigError;
    fn from_str(s: &str) -> Result<Family> {
        Ok(match s {
            "gaussian_random_cov" => Family::GaussianRandomCov,
            "rotated_uniform" => Family::RotatedUniform,
            "student" => Family::Student,
            "gaussian_pair_mean" => Family::GaussianPairMean,
            "gaussian_pair_cov" => Family::GaussianPairCov,
            "gaussian_vs_student" => Family::GaussianVsStudent,
            "student_vs_student" => Family::StudentVsStudent,
            "gaussian_pair_mi" => Family::GaussianPairMi,
            "student_pair_mi" => Family::StudentPairMi,
            other => {
                return Err(RbigError::Usage(format!(
                    "unknown family {other:?}"
                )))
            }
        })
    }
}

/// How a ground-truth value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruthKind {
    /// Closed form in the generating parameters.
    Analytic,
    /// Closed form except for marginal entropies estimated from an
    /// independent Monte-Carlo run of recorded size and seed.
    SemiAnalyticMc,
}

/// One ground-truth value with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruthValue {
    pub value: f64,
    pub kind: TruthKind,
    /// Recorded Monte-Carlo sample count when kind is semi-analytic.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_samples: Option<u64>,
}

impl TruthValue {
    fn analytic(value: f64) -> TruthValue {
        TruthValue {
            value,
            kind: TruthKind::Analytic,
            mc_samples: None,
        }
    }
}

/// The ground truth attached to one generated dataset, for one measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthSpec {
    pub family: Family,
    pub dims: usize,
    /// Family-specific parameters (ν, μ₂, σ₂, diagonal value, MC seeds).
    pub params: serde_json::Value,
    pub truth: f64,
    pub truth_kind: TruthKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_samples: Option<u64>,
}

/// Every measure value a sampler can certify for its output, bundled so one
/// generated dataset can serve several benchmark measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleTruths {
    pub family: Family,
    pub dims: usize,
    pub params: serde_json::Value,
    pub t: Option<TruthValue>,
    pub h: Option<TruthValue>,
    pub kl: Option<TruthValue>,
    pub mi: Option<TruthValue>,
}

impl SampleTruths {
    /// The spec for one measure; errors if this family does not certify it.
    pub fn spec_for(&self, measure: Measure) -> Result<GroundTruthSpec> {
        let tv = match measure {
            Measure::Tc => self.t,
            Measure::H => self.h,
            Measure::Kl => self.kl,
            Measure::Mi => self.mi,
        }
        .ok_or_else(|| {
            RbigError::Usage(format!(
                "family {} has no ground truth for measure {}",
                self.family, measure
            ))
        })?;
        if !tv.value.is_finite() {
            return Err(RbigError::Numeric(format!(
                "non-finite ground truth for {} / {}",
                self.family, measure
            )));
        }
        Ok(GroundTruthSpec {
            family: self.family,
            dims: self.dims,
            params: self.params.clone(),
            truth: tv.value,
            truth_kind: tv.kind,
            mc_samples: tv.mc_samples,
        })
    }
}

const PD_MARGIN: f64 = 1e-6;
const PD_ATTEMPTS: usize = 1000;
/// Monte-Carlo sample count for semi-analytic marginal entropies.
pub const MC_TRUTH_SAMPLES: usize = 500_000;

// ---------------------------------------------------------------------------
// Matrix helpers.

/// Cholesky factor if m − margin·I is positive definite (i.e. the smallest
/// eigenvalue of m exceeds margin), of m itself.
fn cholesky_with_margin(m: &DMatrix<f64>, margin: f64) -> Option<Cholesky<f64, Dyn>> {
    let d = m.nrows();
    let shifted = m - DMatrix::identity(d, d).scale(margin);
    Cholesky::new(shifted)?;
    Cholesky::new(m.clone())
}

fn ln_det_from_cholesky(chol: &Cholesky<f64, Dyn>) -> f64 {
    let l = chol.l_dirty();
    (0..l.nrows()).map(|i| l[(i, i)].ln()).sum::<f64>() * 2.0
}

/// Symmetric matrix with U(0,1) diagonal and symmetrized U(0,1)
/// off-diagonal entries.
fn symmetrized_uniform<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = rng.gen::<f64>();
        for j in (i + 1)..d {
            let v = 0.5 * (rng.gen::<f64>() + rng.gen::<f64>());
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// n samples of N(0, Σ) given Σ's Cholesky factor, rows as samples.
fn gaussian_rows<R: Rng + ?Sized>(
    n: usize,
    chol: &Cholesky<f64, Dyn>,
    rng: &mut R,
) -> DMatrix<f64> {
    let d = chol.l_dirty().nrows();
    let z = DMatrix::from_fn(n, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let lt = chol.l().transpose();
    z * lt
}

// ---------------------------------------------------------------------------
// Gaussian with random covariance.

/// Total correlation and entropy of N(μ, Σ): T = ½Σln Σ_ii − ½ln|Σ|,
/// H = (D/2)ln(2πe) + ½ln|Σ|.
pub fn gaussian_truths_from_cov(cov: &DMatrix<f64>) -> Result<(f64, f64)> {
    let d = cov.nrows();
    if d == 0 || cov.ncols() != d {
        return Err(RbigError::Generation("covariance must be square".into()));
    }
    let chol = Cholesky::new(cov.clone()).ok_or_else(|| {
        RbigError::Generation("covariance is not positive definite".into())
    })?;
    let ln_det = ln_det_from_cholesky(&chol);
    let sum_ln_diag: f64 = (0..d).map(|i| cov[(i, i)].ln()).sum();
    let t = 0.5 * sum_ln_diag - 0.5 * ln_det;
    let h = d as f64 * HALF_LN_2PI_E + 0.5 * ln_det;
    Ok((t, h))
}

/// Random covariance: a symmetrized U(0,1) matrix, rejection-sampled for
/// positive definiteness. In higher dimensions such a matrix is essentially
/// never positive definite, so after exhausting the rejection budget the
/// last candidate is shifted along the diagonal until its smallest
/// eigenvalue is 0.1. Returns the covariance and the shift applied (zero
/// when rejection succeeded); truths must be computed from the returned
/// matrix.
fn random_covariance<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<(DMatrix<f64>, f64)> {
    for _ in 0..PD_ATTEMPTS {
        let cand = symmetrized_uniform(d, rng);
        if cholesky_with_margin(&cand, PD_MARGIN).is_some() {
            return Ok((cand, 0.0));
        }
    }
    // Deterministic fallback: lift the spectrum of one more draw.
    let cand = symmetrized_uniform(d, rng);
    let min_eig = cand
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let diag_shift = 0.1 - min_eig;
    let lifted = &cand + DMatrix::identity(d, d).scale(diag_shift);
    if cholesky_with_margin(&lifted, PD_MARGIN).is_none() {
        return Err(RbigError::Generation(format!(
            "could not build a positive-definite {d}x{d} covariance \
             after {PD_ATTEMPTS} rejections and a diagonal lift"
        )));
    }
    Ok((lifted, diag_shift))
}

/// Draws a random covariance (see [`random_covariance`]) plus n Gaussian
/// samples from it; the recorded truths are computed from the covariance
/// actually used.
pub fn sample_gaussian_random_cov<R: Rng + ?Sized>(
    d: usize,
    n: usize,
    rng: &mut R,
) -> Result<(DataMatrix, SampleTruths)> {
    if d < 1 || n < 1 {
        return Err(RbigError::Config("need d >= 1 and n >= 1".into()));
    }
    let (cov, diag_shift) = random_covariance(d, rng)?;
    let chol = Cholesky::new(cov.clone()).ok_or_else(|| {
        RbigError::Generation("covariance lost positive definiteness".into())
    })?;
    let data = gaussian_rows(n, &chol, rng);
    let (t, h) = gaussian_truths_from_cov(&cov)?;
    let truths = SampleTruths {
        family: Family::GaussianRandomCov,
        dims: d,
        params: serde_json::json!({ "diag_shift": diag_shift }),
        t: Some(TruthValue::analytic(t)),
        h: Some(TruthValue::analytic(h)),
        kl: None,
        mi: None,
    };
    Ok((DataMatrix::from_matrix(data), truths))
}

// ---------------------------------------------------------------------------
// Linearly mixed uniforms.

/// Streaming histogram entropies (Miller-Madow corrected) of each output
/// coordinate of y = M·u with u ~ U(0,1)^d, over mc_n fresh samples drawn
/// from mc_seed. Two passes regenerate the same uniform stream, so memory
/// stays O(d·bins).
fn mc_marginal_entropies(m: &DMatrix<f64>, mc_seed: u64, mc_n: usize) -> Vec<f64> {
    let d = m.ncols();
    let bins = (mc_n as f64).sqrt().ceil() as usize;
    let mt = m.transpose();
    let chunk = 8192usize;

    let mut mins = vec![f64::INFINITY; d];
    let mut maxs = vec![f64::NEG_INFINITY; d];
    let each_chunk = |f: &mut dyn FnMut(&DMatrix<f64>)| {
        let mut rng = ChaCha12Rng::seed_from_u64(mc_seed);
        let mut left = mc_n;
        while left > 0 {
            let c = left.min(chunk);
            let u = DMatrix::from_fn(c, d, |_, _| rng.gen::<f64>());
            let y = &u * &mt;
            f(&y);
            left -= c;
        }
    };

    each_chunk(&mut |y| {
        for j in 0..d {
            for &v in y.column(j).iter() {
                mins[j] = mins[j].min(v);
                maxs[j] = maxs[j].max(v);
            }
        }
    });

    let mut counts = vec![vec![0u64; bins]; d];
    let widths: Vec<f64> = (0..d).map(|j| (maxs[j] - mins[j]) / bins as f64).collect();
    each_chunk(&mut |y| {
        for j in 0..d {
            for &v in y.column(j).iter() {
                let ix = (((v - mins[j]) / widths[j]) as usize).min(bins - 1);
                counts[j][ix] += 1;
            }
        }
    });

    let nf = mc_n as f64;
    (0..d)
        .map(|j| {
            let mut plugin = 0.0;
            let mut occupied = 0u64;
            for &c in &counts[j] {
                if c > 0 {
                    occupied += 1;
                    let p = c as f64 / nf;
                    plugin -= p * p.ln();
                }
            }
            plugin + (occupied as f64 - 1.0) / (2.0 * nf) + widths[j].ln()
        })
        .collect()
}

/// Ground truths of y = M·u for a given mixing matrix: H = ln|det M|
/// exactly; T = Σ H_MC(y_i) − ln|det M| with Monte-Carlo marginal
/// entropies.
pub fn rotated_uniform_truths(
    m: &DMatrix<f64>,
    mc_seed: u64,
    mc_samples: usize,
) -> Result<(f64, f64)> {
    let det = m.clone().lu().determinant();
    if !(det.abs() > 1e-8) {
        return Err(RbigError::Generation(format!(
            "mixing matrix is near-singular (|det| = {:.3e})",
            det.abs()
        )));
    }
    let h = det.abs().ln();
    let marginals = mc_marginal_entropies(m, mc_seed, mc_samples);
    let t = marginals.iter().sum::<f64>() - h;
    Ok((t, h))
}

/// Draws a U(0,1) mixing matrix (rejection-sampled away from singularity)
/// and n samples of y = M·u.
pub fn sample_rotated_uniform<R: Rng + ?Sized>(
    d: usize,
    n: usize,
    rng: &mut R,
) -> Result<(DataMatrix, SampleTruths)> {
    if d < 1 || n < 1 {
        return Err(RbigError::Config("need d >= 1 and n >= 1".into()));
    }
    let mut mix = None;
    for _ in 0..PD_ATTEMPTS {
        let cand = DMatrix::from_fn(d, d, |_, _| rng.gen::<f64>());
        if cand.clone().lu().determinant().abs() > 1e-8 {
            mix = Some(cand);
            break;
        }
    }
    let m = mix.ok_or_else(|| {
        RbigError::Generation(format!(
            "no non-singular {d}x{d} mixing matrix in {PD_ATTEMPTS} draws"
        ))
    })?;
    let mc_seed: u64 = rng.gen();
    let (t, h) = rotated_uniform_truths(&m, mc_seed, MC_TRUTH_SAMPLES)?;

    let u = DMatrix::from_fn(n, d, |_, _| rng.gen::<f64>());
    let data = u * m.transpose();
    let truths = SampleTruths {
        family: Family::RotatedUniform,
        dims: d,
        params: serde_json::json!({ "mc_seed": mc_seed, "mc_samples": MC_TRUTH_SAMPLES as u64 }),
        t: Some(TruthValue {
            value: t,
            kind: TruthKind::SemiAnalyticMc,
            mc_samples: Some(MC_TRUTH_SAMPLES as u64),
        }),
        h: Some(TruthValue::analytic(h)),
        kl: None,
        mi: None,
    };
    Ok((DataMatrix::from_matrix(data), truths))
}

// ---------------------------------------------------------------------------
// Elliptical Student-t.

/// The entropy of a unit-scale D-dimensional Student-t:
/// (D/2)ln(νπ) + lnΓ(ν/2) − lnΓ((ν+D)/2) + ((ν+D)/2)[ψ((ν+D)/2) − ψ(ν/2)].
pub fn student_entropy_const(d: usize, nu: f64) -> Result<f64> {
    if d < 1 || !(nu > 0.0) {
        return Err(RbigError::Domain(format!(
            "student entropy needs d >= 1 and nu > 0, got d={d} nu={nu}"
        )));
    }
    let df = d as f64;
    let half_sum = (nu + df) / 2.0;
    let half_nu = nu / 2.0;
    Ok(df / 2.0 * (nu * std::f64::consts::PI).ln() + log_gamma(half_nu)?
        - log_gamma(half_sum)?
        + half_sum * (digamma(half_sum)? - digamma(half_nu)?))
}

/// Entropy of a D-dimensional Student-t with scale matrix A (log-det
/// supplied): ½ln|A| plus the unit-scale constant.
pub fn student_entropy(d: usize, nu: f64, ln_det_a: f64) -> Result<f64> {
    Ok(0.5 * ln_det_a + student_entropy_const(d, nu)?)
}

/// Total correlation of a D-dimensional Student-t with scale A:
/// ΣH(x_i) − H(x) = ½Σln a_ii − ½ln|A| + D·h₁(ν) − h_D(ν), where h_k is
/// the unit-scale entropy constant (marginals of an elliptical Student are
/// Student with the same ν and scale a_ii).
pub fn student_total_correlation(nu: f64, diag: &[f64], ln_det_a: f64) -> Result<f64> {
    let d = diag.len();
    if d < 1 {
        return Err(RbigError::Domain("empty scale diagonal".into()));
    }
    let sum_ln_diag: f64 = diag.iter().map(|a| a.ln()).sum();
    Ok(0.5 * sum_ln_diag - 0.5 * ln_det_a + d as f64 * student_entropy_const(1, nu)?
        - student_entropy_const(d, nu)?)
}

/// E[ln(c0 + c1·B)] for B ~ Beta(a, b), by Gauss–Legendre quadrature under
/// the substitution B = sin²θ (which removes the endpoint singularities of
/// the Beta density).
fn beta_expect_ln_affine(a: f64, b: f64, c0: f64, c1: f64) -> Result<f64> {
    let ln_b = log_beta(a, b)?;
    let (nodes, weights) = gauss_legendre(256, 0.0, std::f64::consts::FRAC_PI_2);
    let mut acc = 0.0;
    for (&th, &w) in nodes.iter().zip(weights.iter()) {
        let s = th.sin();
        let c = th.cos();
        let ln_density = (2.0 * a - 1.0) * s.ln() + (2.0 * b - 1.0) * c.ln() - ln_b
            + std::f64::consts::LN_2;
        acc += w * ln_density.exp() * (c0 + c1 * s * s).ln();
    }
    Ok(acc)
}

/// KL divergence between two zero-mean, identity-scale D-dimensional
/// Student-t distributions with ν₁ (numerator) and ν₂ (denominator)
/// degrees of freedom: ln(K₁/K₂) − E₁ + E₂. E₁ is closed-form in
/// digammas; E₂ reduces to a one-dimensional Beta expectation because
/// ‖x‖²/(‖x‖²+ν₁) ~ Beta(D/2, ν₁/2) under the numerator distribution.
pub fn student_student_kl(d: usize, nu1: f64, nu2: f64) -> Result<f64> {
    if d < 1 || !(nu1 > 0.0) || !(nu2 > 0.0) {
        return Err(RbigError::Domain(format!(
            "student KL needs d >= 1 and positive dof, got d={d} nu1={nu1} nu2={nu2}"
        )));
    }
    let df = d as f64;
    let ln_k = |nu: f64| -> Result<f64> {
        Ok(log_gamma((nu + df) / 2.0)? - log_gamma(nu / 2.0)?
            - df / 2.0 * (nu * std::f64::consts::PI).ln())
    };
    let psi_gap = digamma((nu1 + df) / 2.0)? - digamma(nu1 / 2.0)?;
    let e1 = (nu1 + df) / 2.0 * psi_gap;
    let eb = beta_expect_ln_affine(df / 2.0, nu1 / 2.0, nu2, nu1 - nu2)?;
    let e2 = (nu2 + df) / 2.0 * (eb - nu2.ln() + psi_gap);
    Ok(ln_k(nu1)? - ln_k(nu2)? - e1 + e2)
}

/// Builds the benchmark Student scale matrix: fixed diagonal, symmetrized
/// U(0,1) off-diagonal, rejection-sampled for positive definiteness.
fn student_scale<R: Rng + ?Sized>(d: usize, diag: f64, rng: &mut R) -> Result<DMatrix<f64>> {
    for _ in 0..PD_ATTEMPTS {
        let mut cand = symmetrized_uniform(d, rng);
        for i in 0..d {
            cand[(i, i)] = diag;
        }
        if cholesky_with_margin(&cand, PD_MARGIN).is_some() {
            return Ok(cand);
        }
    }
    Err(RbigError::Generation(format!(
        "no positive-definite {d}x{d} scale matrix with diagonal {diag} \
         in {PD_ATTEMPTS} draws"
    )))
}

/// n samples of the zero-mean elliptical Student-t with the given scale
/// Cholesky factor: x = L·z·sqrt(ν/w), one chi-square mixing draw w per
/// sample (shared across coordinates).
fn student_rows<R: Rng + ?Sized>(
    n: usize,
    nu: f64,
    chol: &Cholesky<f64, Dyn>,
    rng: &mut R,
) -> Result<DMatrix<f64>> {
    let chi_sq = Gamma::new(nu / 2.0, 2.0)
        .map_err(|e| RbigError::Generation(format!("chi-square sampler: {e}")))?;
    let mut x = gaussian_rows(n, chol, rng);
    for i in 0..n {
        let w: f64 = chi_sq.sample(rng);
        let scale = (nu / w).sqrt();
        for j in 0..x.ncols() {
            x[(i, j)] *= scale;
        }
    }
    Ok(x)
}

/// Draws the benchmark Student dataset (scale: fixed diagonal, U(0,1)
/// off-diagonals) plus its analytic total correlation and entropy.
pub fn sample_student<R: Rng + ?Sized>(
    d: usize,
    n: usize,
    nu: f64,
    diag: f64,
    rng: &mut R,
) -> Result<(DataMatrix, SampleTruths)> {
    if d < 1 || n < 1 {
        return Err(RbigError::Config("need d >= 1 and n >= 1".into()));
    }
    if !(nu > 0.0) || !(diag > 0.0) {
        return Err(RbigError::Config(format!(
            "need nu > 0 and diag > 0, got nu={nu} diag={diag}"
        )));
    }
    let scale = student_scale(d, diag, rng)?;
    let chol = Cholesky::new(scale.clone())
        .ok_or_else(|| RbigError::Generation("scale lost positive definiteness".into()))?;
    let ln_det = ln_det_from_cholesky(&chol);
    let data = student_rows(n, nu, &chol, rng)?;
    let diag_vec: Vec<f64> = (0..d).map(|i| scale[(i, i)]).collect();
    let t = student_total_correlation(nu, &diag_vec, ln_det)?;
    let h = student_entropy(d, nu, ln_det)?;
    let truths = SampleTruths {
        family: Family::Student,
        dims: d,
        params: serde_json::json!({ "nu": nu, "diag": diag }),
        t: Some(TruthValue::analytic(t)),
        h: Some(TruthValue::analytic(h)),
        kl: None,
        mi: None,
    };
    Ok((DataMatrix::from_matrix(data), truths))
}

// ---------------------------------------------------------------------------
// KL-divergence pairs.

/// General Gaussian KL divergence D(N(μ₁,Σ₁) ‖ N(μ₂,Σ₂)):
/// ½[tr(Σ₂⁻¹Σ₁) + Δᵀ Σ₂⁻¹ Δ − d + ln|Σ₂| − ln|Σ₁|], Δ = μ₂ − μ₁.
pub fn gaussian_kl(
    mu1: &[f64],
    sigma1: &DMatrix<f64>,
    mu2: &[f64],
    sigma2: &DMatrix<f64>,
) -> Result<f64> {
    let d = mu1.len();
    if mu2.len() != d || sigma1.nrows() != d || sigma2.nrows() != d {
        return Err(RbigError::Generation("KL inputs disagree on dimension".into()));
    }
    let chol1 = Cholesky::new(sigma1.clone())
        .ok_or_else(|| RbigError::Generation("sigma1 not positive definite".into()))?;
    let chol2 = Cholesky::new(sigma2.clone())
        .ok_or_else(|| RbigError::Generation("sigma2 not positive definite".into()))?;
    let trace = chol2.solve(sigma1).trace();
    let delta = nalgebra::DVector::from_iterator(d, mu2.iter().zip(mu1).map(|(a, b)| a - b));
    let quad_term = delta.dot(&chol2.solve(&delta));
    let ln_det1 = ln_det_from_cholesky(&chol1);
    let ln_det2 = ln_det_from_cholesky(&chol2);
    Ok(0.5 * (trace + quad_term - d as f64 + ln_det2 - ln_det1))
}

/// The paired-distribution KL benchmark protocols. The first distribution
/// is the numerator P, the second the denominator Q of D(P ‖ Q).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KlKind {
    /// N(0, I) vs N(μ₂·1, I).
    GaussianPairMean { mu2: f64 },
    /// N(0, I) vs N(0, σ₂·Q + I) with Q symmetric U(0,1), off-diagonals
    /// scaled by 1/√d to keep the result positive definite in any
    /// dimension.
    GaussianPairCov { sigma2: f64 },
    /// Near-Gaussian Student (ν₁ = 100 proxy) vs Student ν₂, identity
    /// scales.
    GaussianVsStudent { nu2: f64 },
    /// Student ν₁ = 8 vs Student ν₂, identity scales.
    StudentVsStudent { nu2: f64 },
}

/// ν used as the Gaussian proxy in the Gaussian-vs-Student protocol.
pub const GAUSSIAN_PROXY_NU: f64 = 100.0;
/// Fixed numerator ν in the Student-vs-Student protocol.
pub const STUDENT_PAIR_NU1: f64 = 8.0;

/// Draws the two sample sets of a KL benchmark pair plus the analytic
/// divergence D(P ‖ Q). Both sets have n rows.
pub fn make_kl_pair<R: Rng + ?Sized>(
    kind: KlKind,
    d: usize,
    n: usize,
    rng: &mut R,
) -> Result<(DataMatrix, DataMatrix, SampleTruths)> {
    if d < 1 || n < 1 {
        return Err(RbigError::Config("need d >= 1 and n >= 1".into()));
    }
    let eye = DMatrix::<f64>::identity(d, d);
    let id_chol = Cholesky::new(eye.clone())
        .ok_or_else(|| RbigError::Generation("identity Cholesky failed".into()))?;
    match kind {
        KlKind::GaussianPairMean { mu2 } => {
            if !mu2.is_finite() {
                return Err(RbigError::Config(format!("bad mu2 {mu2}")));
            }
            let x = gaussian_rows(n, &id_chol, rng);
            let mut y = gaussian_rows(n, &id_chol, rng);
            for v in y.iter_mut() {
                *v += mu2;
            }
            let truth = 0.5 * d as f64 * mu2 * mu2;
            let truths = SampleTruths {
                family: Family::GaussianPairMean,
                dims: d,
                params: serde_json::json!({ "mu2": mu2 }),
                t: None,
                h: None,
                kl: Some(TruthValue::analytic(truth)),
                mi: None,
            };
            Ok((
                DataMatrix::from_matrix(x),
                DataMatrix::from_matrix(y),
                truths,
            ))
        }
        KlKind::GaussianPairCov { sigma2 } => {
            if !(sigma2.is_finite() && sigma2 >= 0.0) {
                return Err(RbigError::Config(format!("bad sigma2 {sigma2}")));
            }
            let off_scale = 1.0 / (d as f64).sqrt();
            let mut cov2 = None;
            for _ in 0..PD_ATTEMPTS {
                let mut q = symmetrized_uniform(d, rng);
                for i in 0..d {
                    for j in 0..d {
                        if i != j {
                            q[(i, j)] *= off_scale;
                        }
                    }
                }
                let cand = &eye + q.scale(sigma2);
                if cholesky_with_margin(&cand, PD_MARGIN).is_some() {
                    cov2 = Some(cand);
                    break;
                }
            }
            let cov2 = cov2.ok_or_else(|| {
                RbigError::Generation(format!(
                    "no positive-definite {d}x{d} second covariance in {PD_ATTEMPTS} draws"
                ))
            })?;
            let chol2 = Cholesky::new(cov2.clone())
                .ok_or_else(|| RbigError::Generation("cov2 lost positive definiteness".into()))?;
            let x = gaussian_rows(n, &id_chol, rng);
            let y = gaussian_rows(n, &chol2, rng);
            let zeros = vec![0.0; d];
            let truth = gaussian_kl(&zeros, &eye, &zeros, &cov2)?;
            let truths = SampleTruths {
                family: Family::GaussianPairCov,
                dims: d,
                params: serde_json::json!({ "sigma2": sigma2 }),
                t: None,
                h: None,
                kl: Some(TruthValue::analytic(truth)),
                mi: None,
            };
            Ok((
                DataMatrix::from_matrix(x),
                DataMatrix::from_matrix(y),
                truths,
            ))
        }
        KlKind::GaussianVsStudent { nu2 } => {
            let (x, y, truth) = student_kl_samples(d, n, GAUSSIAN_PROXY_NU, nu2, &id_chol, rng)?;
            let truths = SampleTruths {
                family: Family::GaussianVsStudent,
                dims: d,
                params: serde_json::json!({ "nu1": GAUSSIAN_PROXY_NU, "nu2": nu2 }),
                t: None,
                h: None,
                kl: Some(TruthValue::analytic(truth)),
                mi: None,
            };
            Ok((x, y, truths))
        }
        KlKind::StudentVsStudent { nu2 } => {
            let (x, y, truth) = student_kl_samples(d, n, STUDENT_PAIR_NU1, nu2, &id_chol, rng)?;
            let truths = SampleTruths {
                family: Family::StudentVsStudent,
                dims: d,
                params: serde_json::json!({ "nu1": STUDENT_PAIR_NU1, "nu2": nu2 }),
                t: None,
                h: None,
                kl: Some(TruthValue::analytic(truth)),
                mi: None,
            };
            Ok((x, y, truths))
        }
    }
}

fn student_kl_samples<R: Rng + ?Sized>(
    d: usize,
    n: usize,
    nu1: f64,
    nu2: f64,
    id_chol: &Cholesky<f64, Dyn>,
    rng: &mut R,
) -> Result<(DataMatrix, DataMatrix, f64)> {
    let x = student_rows(n, nu1, id_chol, rng)?;
    let y = student_rows(n, nu2, id_chol, rng)?;
    let truth = student_student_kl(d, nu1, nu2)?;
    Ok((
        DataMatrix::from_matrix(x),
        DataMatrix::from_matrix(y),
        truth,
    ))
}

// ---------------------------------------------------------------------------
// Mutual-information pairs.

/// The paired-variable MI benchmark protocols: a joint 2d-dimensional
/// distribution split into x (first d columns) and y (last d columns).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MiKind {
    /// Joint Gaussian with a random covariance drawn the same way as the
    /// total-correlation benchmark (see [`random_covariance`]), at the
    /// joint dimension 2d.
    Gaussian,
    /// Joint elliptical Student, scale with fixed diagonal [`MI_DIAG`] and
    /// U(0,1) off-diagonals.
    Student { nu: f64 },
}

/// Diagonal value of the joint scale matrix in the Student MI protocol.
pub const MI_DIAG: f64 = 10.0;

/// Draws a joint sample and splits it into the two variables, with the
/// analytic mutual information. `d` is the dimension of EACH variable.
pub fn make_mi_pair<R: Rng + ?Sized>(
    kind: MiKind,
    d: usize,
    n: usize,
    rng: &mut R,
) -> Result<(DataMatrix, DataMatrix, SampleTruths)> {
    if d < 1 || n < 1 {
        return Err(RbigError::Config("need d >= 1 and n >= 1".into()));
    }
    let q = 2 * d;
    let (scale, params) = match kind {
        MiKind::Gaussian => {
            let (cov, diag_shift) = random_covariance(q, rng)?;
            (cov, serde_json::json!({ "diag_shift": diag_shift }))
        }
        MiKind::Student { nu } => {
            if !(nu > 0.0) {
                return Err(RbigError::Config(format!("bad nu {nu}")));
            }
            (
                student_scale(q, MI_DIAG, rng)?,
                serde_json::json!({ "nu": nu, "diag": MI_DIAG }),
            )
        }
    };
    let chol = Cholesky::new(scale.clone())
        .ok_or_else(|| RbigError::Generation("joint scale lost positive definiteness".into()))?;
    let ln_det = ln_det_from_cholesky(&chol);
    let xx = scale.view((0, 0), (d, d)).into_owned();
    let yy = scale.view((d, d), (d, d)).into_owned();
    let ln_det_xx = ln_det_from_cholesky(&Cholesky::new(xx).ok_or_else(|| {
        RbigError::Generation("x-block of joint scale not positive definite".into())
    })?);
    let ln_det_yy = ln_det_from_cholesky(&Cholesky::new(yy).ok_or_else(|| {
        RbigError::Generation("y-block of joint scale not positive definite".into())
    })?);
    let block_term = 0.5 * (ln_det_xx + ln_det_yy - ln_det);

    let (joint, truth, family) = match kind {
        MiKind::Gaussian => (gaussian_rows(n, &chol, rng), block_term, Family::GaussianPairMi),
        MiKind::Student { nu } => {
            // I = T(joint) − T(x) − T(y); the diagonal sums cancel, leaving
            // the block determinant term plus the ν-dependent constants.
            let truth = block_term + 2.0 * student_entropy_const(d, nu)?
                - student_entropy_const(q, nu)?;
            (student_rows(n, nu, &chol, rng)?, truth, Family::StudentPairMi)
        }
    };
    let x = joint.view((0, 0), (n, d)).into_owned();
    let y = joint.view((0, d), (n, d)).into_owned();
    let truths = SampleTruths {
        family,
        dims: d,
        params,
        t: None,
        h: None,
        kl: None,
        mi: Some(TruthValue::analytic(truth)),
    };
    Ok((
        DataMatrix::from_matrix(x),
        DataMatrix::from_matrix(y),
        truths,
    ))
}
