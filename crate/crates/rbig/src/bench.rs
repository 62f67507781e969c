//! Benchmark harness: runs a (measure, family) protocol over a grid of
//! dimensions and sample counts, with per-trial derived seeds, identical
//! data shared by every requested estimator, and deterministic report
//! assembly.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::data::DataMatrix;
use crate::error::{RbigError, Result};
use crate::estimators::{
    estimate_entropy, estimate_kl, estimate_mutual_information, estimate_total_correlation,
    expf_entropy, expf_kl, expf_mutual_information, expf_total_correlation, knn_entropy, knn_kl,
    knn_mutual_information, knn_total_correlation, EstimatorId, MeasureEstimate,
};
use crate::model::RbigConfig;
use crate::report::{aggregate_of, ExperimentReport, TrialRow, TOOL_VERSION};
use crate::seed::derive_seed;
use crate::synth::{
    make_kl_pair, make_mi_pair, sample_gaussian_random_cov, sample_rotated_uniform,
    sample_student, GroundTruthSpec, KlKind, Measure, MiKind,
};

/// Benchmark grid defaults mirroring the comparison-table protocols.
pub const DEFAULT_DIMS: &[usize] = &[3, 10, 50, 100];
pub const DEFAULT_SAMPLES: &[usize] = &[100, 1000, 10_000];
pub const DEFAULT_TRIALS: usize = 5;
/// Diagonal of the Student scale matrix in the shape protocols.
pub const STUDENT_DIAG: f64 = 10.0;

/// A benchmark family with its protocol parameters. For entropy and total
/// correlation the token selects a sampler directly; for KL it selects a
/// distribution pair; for MI it selects the joint construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BenchFamily {
    Gaussian,
    RotatedUniform,
    Student { nu: f64 },
    GaussianPairMean { mu2: f64 },
    GaussianPairCov { sigma2: f64 },
    GaussianVsStudent { nu2: f64 },
    StudentVsStudent { nu2: f64 },
}

impl BenchFamily {
    /// Which measures this family provides ground truth for.
    pub fn supported_measures(&self) -> &'static [Measure] {
        match self {
            BenchFamily::Gaussian | BenchFamily::Student { .. } => {
                &[Measure::Tc, Measure::H, Measure::Mi]
            }
            BenchFamily::RotatedUniform => &[Measure::Tc, Measure::H],
            BenchFamily::GaussianPairMean { .. }
            | BenchFamily::GaussianPairCov { .. }
            | BenchFamily::GaussianVsStudent { .. }
            | BenchFamily::StudentVsStudent { .. } => &[Measure::Kl],
        }
    }

    /// The CLI token (without parameters).
    pub fn token(&self) -> &'static str {
        match self {
            BenchFamily::Gaussian => "gaussian",
            BenchFamily::RotatedUniform => "rotated_uniform",
            BenchFamily::Student { .. } => "student",
            BenchFamily::GaussianPairMean { .. } => "gaussian_pair_mean",
            BenchFamily::GaussianPairCov { .. } => "gaussian_pair_cov",
            BenchFamily::GaussianVsStudent { .. } => "gaussian_vs_student",
            BenchFamily::StudentVsStudent { .. } => "student_vs_student",
        }
    }

    /// Protocol parameters echoed into reports.
    pub fn params_json(&self) -> serde_json::Value {
        match *self {
            BenchFamily::Gaussian | BenchFamily::RotatedUniform => serde_json::json!({}),
            BenchFamily::Student { nu } => {
                serde_json::json!({ "nu": nu, "diag": STUDENT_DIAG })
            }
            BenchFamily::GaussianPairMean { mu2 } => serde_json::json!({ "mu2": mu2 }),
            BenchFamily::GaussianPairCov { sigma2 } => serde_json::json!({ "sigma2": sigma2 }),
            BenchFamily::GaussianVsStudent { nu2 } => serde_json::json!({ "nu2": nu2 }),
            BenchFamily::StudentVsStudent { nu2 } => serde_json::json!({ "nu2": nu2 }),
        }
    }

    fn describe_valid_pairs() -> String {
        "valid (measure, family) pairs: tc/h with gaussian, rotated_uniform, student; \
         kl with gaussian_pair_mean, gaussian_pair_cov, gaussian_vs_student, \
         student_vs_student; mi with gaussian, student"
            .to_string()
    }
}

/// A full benchmark request.
#[derive(Debug, Clone)]
pub struct BenchRequest {
    pub measure: Measure,
    pub family: BenchFamily,
    pub dims: Vec<usize>,
    pub samples: Vec<usize>,
    pub trials: usize,
    pub estimators: Vec<EstimatorId>,
    pub seed: u64,
    /// Base Gaussianization configuration; the per-trial RNG seed is
    /// derived and overrides `rng_seed`.
    pub base_config: RbigConfig,
    pub knn_k: usize,
    /// When false, wall times are recorded as zero so that identical
    /// seeds produce byte-identical reports.
    pub record_timing: bool,
}

enum Payload {
    Single(DataMatrix),
    Pair(DataMatrix, DataMatrix),
}

fn draw_cell(
    measure: Measure,
    family: BenchFamily,
    d: usize,
    n: usize,
    rng: &mut ChaCha12Rng,
) -> Result<(GroundTruthSpec, Payload)> {
    let unsupported = || {
        RbigError::Usage(format!(
            "family {} does not provide ground truth for measure {}; {}",
            family.token(),
            measure,
            BenchFamily::describe_valid_pairs()
        ))
    };
    match (measure, family) {
        (Measure::Tc | Measure::H, BenchFamily::Gaussian) => {
            let (data, truths) = sample_gaussian_random_cov(d, n, rng)?;
            Ok((truths.spec_for(measure)?, Payload::Single(data)))
        }
        (Measure::Tc | Measure::H, BenchFamily::RotatedUniform) => {
            let (data, truths) = sample_rotated_uniform(d, n, rng)?;
            Ok((truths.spec_for(measure)?, Payload::Single(data)))
        }
        (Measure::Tc | Measure::H, BenchFamily::Student { nu }) => {
            let (data, truths) = sample_student(d, n, nu, STUDENT_DIAG, rng)?;
            Ok((truths.spec_for(measure)?, Payload::Single(data)))
        }
        (Measure::Kl, fam) => {
            let kind = match fam {
                BenchFamily::GaussianPairMean { mu2 } => KlKind::GaussianPairMean { mu2 },
                BenchFamily::GaussianPairCov { sigma2 } => KlKind::GaussianPairCov { sigma2 },
                BenchFamily::GaussianVsStudent { nu2 } => KlKind::GaussianVsStudent { nu2 },
                BenchFamily::StudentVsStudent { nu2 } => KlKind::StudentVsStudent { nu2 },
                _ => return Err(unsupported()),
            };
            let (num, den, truths) = make_kl_pair(kind, d, n, rng)?;
            Ok((truths.spec_for(Measure::Kl)?, Payload::Pair(num, den)))
        }
        (Measure::Mi, fam) => {
            let kind = match fam {
                BenchFamily::Gaussian => MiKind::Gaussian,
                BenchFamily::Student { nu } => MiKind::Student { nu },
                _ => return Err(unsupported()),
            };
            let (x, y, truths) = make_mi_pair(kind, d, n, rng)?;
            Ok((truths.spec_for(Measure::Mi)?, Payload::Pair(x, y)))
        }
        _ => Err(unsupported()),
    }
}

/// Runs one estimator on one measure. `y` is the second sample set: the
/// denominator/reference distribution for KL (so the result is the
/// divergence of `x`'s distribution from `y`'s) and the second variable
/// for MI. It must be absent for total correlation and entropy.
pub fn run_measure(
    measure: Measure,
    est: EstimatorId,
    x: &DataMatrix,
    y: Option<&DataMatrix>,
    cfg: &RbigConfig,
    k: usize,
) -> Result<MeasureEstimate> {
    match (measure, y) {
        (Measure::Tc, None) => match est {
            EstimatorId::Rbig => estimate_total_correlation(x, cfg),
            EstimatorId::Expf => expf_total_correlation(x),
            EstimatorId::Knn => knn_total_correlation(x, k),
        },
        (Measure::H, None) => match est {
            EstimatorId::Rbig => estimate_entropy(x, cfg),
            EstimatorId::Expf => expf_entropy(x),
            EstimatorId::Knn => knn_entropy(x, k),
        },
        (Measure::Kl, Some(den)) => match est {
            EstimatorId::Rbig => estimate_kl(x, den, cfg),
            EstimatorId::Expf => expf_kl(x, den),
            EstimatorId::Knn => knn_kl(x, den, k),
        },
        (Measure::Mi, Some(second)) => match est {
            EstimatorId::Rbig => estimate_mutual_information(x, second, cfg),
            EstimatorId::Expf => expf_mutual_information(x, second),
            EstimatorId::Knn => knn_mutual_information(x, second, k),
        },
        (Measure::Tc | Measure::H, Some(_)) => Err(RbigError::Usage(format!(
            "measure {measure} takes a single sample set"
        ))),
        (Measure::Kl | Measure::Mi, None) => Err(RbigError::Usage(format!(
            "measure {measure} needs a second sample set"
        ))),
    }
}

fn run_estimator(
    measure: Measure,
    est: EstimatorId,
    payload: &Payload,
    cfg: &RbigConfig,
    k: usize,
) -> Result<MeasureEstimate> {
    match payload {
        Payload::Single(x) => run_measure(measure, est, x, None, cfg, k),
        Payload::Pair(a, b) => run_measure(measure, est, a, Some(b), cfg, k),
    }
}

struct CellResult {
    dims: usize,
    n: usize,
    truth_spec: GroundTruthSpec,
    rows: Vec<(EstimatorId, TrialRow)>,
}

fn run_cell(req: &BenchRequest, d: usize, n: usize, trial: usize) -> Result<CellResult> {
    let data_seed = derive_seed(req.seed, "bench-data", &[d as u64, n as u64, trial as u64]);
    let mut rng = ChaCha12Rng::seed_from_u64(data_seed);
    let (truth_spec, payload) = draw_cell(req.measure, req.family, d, n, &mut rng)?;
    let truth = truth_spec.truth;
    if truth == 0.0 {
        return Err(RbigError::Numeric(format!(
            "ground truth is exactly zero for {} / {} at d={d}; relative error undefined",
            req.family.token(),
            req.measure
        )));
    }
    let fit_seed = derive_seed(req.seed, "bench-fit", &[d as u64, n as u64, trial as u64]);
    let cfg = RbigConfig {
        rng_seed: fit_seed,
        ..req.base_config.clone()
    };
    let mut rows = Vec::with_capacity(req.estimators.len());
    for &est in &req.estimators {
        let me = run_estimator(req.measure, est, &payload, &cfg, req.knn_k)?;
        let rel = 100.0 * (me.value - truth).abs() / truth.abs();
        rows.push((
            est,
            TrialRow {
                trial,
                estimate: me.value,
                truth,
                relative_abs_error_percent: rel,
                wall_time: if req.record_timing { me.wall_time } else { 0.0 },
            },
        ));
    }
    Ok(CellResult {
        dims: d,
        n,
        truth_spec,
        rows,
    })
}

/// Runs the full benchmark grid. Cells (dim × samples × trial) execute in
/// a parallel work pool with independent derived seeds; each estimator
/// sees the same data within a cell; reports come out sorted by
/// (estimator order as requested, dims, n_samples) with trials in order.
pub fn run_benchmark(req: &BenchRequest) -> Result<Vec<ExperimentReport>> {
    if req.trials < 1 {
        return Err(RbigError::Usage("trials must be >= 1".into()));
    }
    if req.dims.is_empty() || req.samples.is_empty() {
        return Err(RbigError::Usage("dims and samples must be non-empty".into()));
    }
    if req.estimators.is_empty() {
        return Err(RbigError::Usage(
            "at least one estimator must be requested".into(),
        ));
    }
    if !req.family.supported_measures().contains(&req.measure) {
        return Err(RbigError::Usage(format!(
            "family {} does not provide ground truth for measure {}; {}",
            req.family.token(),
            req.measure,
            BenchFamily::describe_valid_pairs()
        )));
    }
    req.base_config.validate()?;

    let mut dims = req.dims.clone();
    dims.sort_unstable();
    dims.dedup();
    let mut samples = req.samples.clone();
    samples.sort_unstable();
    samples.dedup();

    let mut cells = Vec::new();
    for &d in &dims {
        for &n in &samples {
            for trial in 0..req.trials {
                cells.push((d, n, trial));
            }
        }
    }
    let results: Vec<CellResult> = cells
        .par_iter()
        .map(|&(d, n, trial)| run_cell(req, d, n, trial))
        .collect::<Result<Vec<_>>>()?;

    let mut reports = Vec::new();
    for &est in &req.estimators {
        for &d in &dims {
            for &n in &samples {
                let mut trials: Vec<TrialRow> = Vec::with_capacity(req.trials);
                let mut truth_kind = None;
                for cell in results.iter().filter(|c| c.dims == d && c.n == n) {
                    truth_kind = Some(cell.truth_spec.truth_kind);
                    for (e, row) in &cell.rows {
                        if *e == est {
                            trials.push(row.clone());
                        }
                    }
                }
                trials.sort_by_key(|t| t.trial);
                let aggregate = aggregate_of(&trials);
                let family = results
                    .iter()
                    .find(|c| c.dims == d && c.n == n)
                    .map(|c| c.truth_spec.family)
                    .expect("cell results cover the grid");
                reports.push(ExperimentReport {
                    measure: req.measure,
                    family,
                    params: req.family.params_json(),
                    dims: d,
                    n_samples: n,
                    n_trials: req.trials,
                    estimator_id: est,
                    seed: req.seed,
                    tool_version: TOOL_VERSION.to_string(),
                    truth_kind: truth_kind.expect("at least one trial per cell"),
                    trials,
                    aggregate,
                });
            }
        }
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::Family;

    fn small_request() -> BenchRequest {
        BenchRequest {
            measure: Measure::Tc,
            family: BenchFamily::Gaussian,
            dims: vec![2],
            samples: vec![500],
            trials: 2,
            estimators: vec![EstimatorId::Rbig, EstimatorId::Expf],
            seed: 7,
            base_config: RbigConfig::default(),
            knn_k: 3,
            record_timing: false,
        }
    }

    #[test]
    fn benchmark_produces_consistent_reports() {
        let reports = run_benchmark(&small_request()).unwrap();
        assert_eq!(reports.len(), 2); // one per estimator
        for r in &reports {
            assert_eq!(r.family, Family::GaussianRandomCov);
            assert_eq!(r.n_trials, 2);
            assert_eq!(r.trials.len(), 2);
            assert_eq!(r.trials[0].trial, 0);
            assert_eq!(r.trials[1].trial, 1);
            for t in &r.trials {
                assert!(t.estimate.is_finite());
                assert!(t.truth.is_finite() && t.truth != 0.0);
                assert!(t.relative_abs_error_percent >= 0.0);
                assert_eq!(t.wall_time, 0.0);
            }
            let recomputed = aggregate_of(&r.trials);
            assert_eq!(recomputed.mean_rel_mae, r.aggregate.mean_rel_mae);
        }
        // Same data within a trial: truths agree across estimators.
        assert_eq!(reports[0].trials[0].truth, reports[1].trials[0].truth);
        // Different trials saw different data.
        assert_ne!(reports[0].trials[0].truth, reports[0].trials[1].truth);
    }

    #[test]
    fn benchmark_is_deterministic() {
        let a = run_benchmark(&small_request()).unwrap();
        let b = run_benchmark(&small_request()).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn adding_a_dimension_does_not_perturb_other_cells() {
        let narrow = run_benchmark(&small_request()).unwrap();
        let mut wider_req = small_request();
        wider_req.dims = vec![2, 3];
        let wide = run_benchmark(&wider_req).unwrap();
        let narrow_cell = &narrow[0];
        let wide_cell = wide
            .iter()
            .find(|r| r.dims == 2 && r.estimator_id == narrow_cell.estimator_id)
            .unwrap();
        assert_eq!(narrow_cell.trials, wide_cell.trials);
    }

    #[test]
    fn unsupported_pair_is_a_usage_error_listing_pairs() {
        let mut req = small_request();
        req.family = BenchFamily::GaussianPairMean { mu2: 0.4 };
        match run_benchmark(&req) {
            Err(RbigError::Usage(msg)) => assert!(msg.contains("valid (measure, family)")),
            other => panic!("expected usage error, got {other:?}"),
        }
    }

    #[test]
    fn kl_benchmark_hits_the_closed_form_truth() {
        let req = BenchRequest {
            measure: Measure::Kl,
            family: BenchFamily::GaussianPairMean { mu2: 0.4 },
            dims: vec![3],
            samples: vec![2000],
            trials: 1,
            estimators: vec![EstimatorId::Expf],
            seed: 11,
            base_config: RbigConfig::default(),
            knn_k: 3,
            record_timing: false,
        };
        let reports = run_benchmark(&req).unwrap();
        let truth = reports[0].trials[0].truth;
        assert!((truth - 0.5 * 3.0 * 0.16).abs() < 1e-12, "truth = {truth}");
        assert!(reports[0].aggregate.mean_rel_mae < 20.0);
    }

    #[test]
    fn mi_benchmark_runs_both_kinds() {
        for family in [BenchFamily::Gaussian, BenchFamily::Student { nu: 5.0 }] {
            let req = BenchRequest {
                measure: Measure::Mi,
                family,
                dims: vec![1],
                samples: vec![500],
                trials: 1,
                estimators: vec![EstimatorId::Expf],
                seed: 3,
                base_config: RbigConfig::default(),
                knn_k: 3,
                record_timing: false,
            };
            let reports = run_benchmark(&req).unwrap();
            assert!(reports[0].trials[0].truth > 0.0);
        }
    }

    #[test]
    fn timing_flag_records_positive_wall_times() {
        let mut req = small_request();
        req.record_timing = true;
        let reports = run_benchmark(&req).unwrap();
        assert!(reports[0].trials[0].wall_time > 0.0);
    }

    #[test]
    fn bad_requests_are_usage_errors() {
        let mut req = small_request();
        req.trials = 0;
        assert!(matches!(run_benchmark(&req), Err(RbigError::Usage(_))));
        let mut req = small_request();
        req.dims.clear();
        assert!(matches!(run_benchmark(&req), Err(RbigError::Usage(_))));
        let mut req = small_request();
        req.estimators.clear();
        assert!(matches!(run_benchmark(&req), Err(RbigError::Usage(_))));
    }
}
