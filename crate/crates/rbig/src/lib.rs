//! Rotation-based iterative Gaussianization (RBIG) and the
//! information-theoretic estimators built on it: total correlation,
//! differential entropy, KL divergence, and mutual information, plus
//! parametric and nearest-neighbor baselines, synthetic samplers with
//! analytic ground truths, and a benchmark harness.

pub mod bench;
pub mod csvio;
pub mod data;
pub mod error;
pub mod estimators;
pub mod marginal;
pub mod model;
pub mod oracle;
pub mod quad;
pub mod report;
pub mod rotation;
pub mod seed;
pub mod special;
pub mod synth;

pub use data::DataMatrix;
pub use error::{RbigError, Result};
pub use estimators::{
    estimate_entropy, estimate_kl, estimate_mutual_information, estimate_total_correlation,
    expf_entropy, expf_kl, expf_mutual_information, expf_total_correlation, knn_entropy, knn_kl,
    knn_mutual_information, knn_total_correlation, EstimatorId, MeasureEstimate, DEFAULT_KNN_K,
};
pub use marginal::{
    fit_marginal_map, gaussianize_forward, gaussianize_inverse, marginal_entropy,
    marginal_kl_to_std_normal, EntropyEstimator, MarginalMap,
};
pub use bench::{run_benchmark, BenchFamily, BenchRequest, DEFAULT_DIMS, DEFAULT_SAMPLES, DEFAULT_TRIALS};
pub use model::{calibrate_noise_floor, fit, RbigConfig, RbigLayer, RbigModel, StopReason};
pub use report::{emit_reports, render_reports, ExperimentReport, ReportFormat};
pub use rotation::{pca_rotation, random_rotation, RotationKind};
pub use synth::{Family, Measure};
