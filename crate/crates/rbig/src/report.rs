//! Benchmark report types and emission: one report per estimator and
//! benchmark cell, with per-trial rows and recomputable aggregates,
//! serialized as JSON or CSV with full 64-bit float round-tripping.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{RbigError, Result};
use crate::estimators::EstimatorId;
use crate::synth::{Family, Measure, TruthKind};

/// Version string stamped into every report.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One estimator run on one generated dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: usize,
    pub estimate: f64,
    pub truth: f64,
    /// 100·|estimate − truth| / |truth|.
    pub relative_abs_error_percent: f64,
    pub wall_time: f64,
}

/// Mean and sample standard deviation (n−1 denominator; zero for a single
/// trial) of the per-trial relative absolute errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean_rel_mae: f64,
    pub std_rel_mae: f64,
}

/// Everything needed to reproduce and interpret one benchmark cell: the
/// measure, the generating family and its protocol parameters, the shape,
/// the estimator, the master seed, and the per-trial outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub measure: Measure,
    pub family: Family,
    /// Protocol parameters (ν, μ₂, σ₂, ...) echoed from the request.
    pub params: serde_json::Value,
    pub dims: usize,
    pub n_samples: usize,
    pub n_trials: usize,
    pub estimator_id: EstimatorId,
    pub seed: u64,
    pub tool_version: String,
    /// How the per-trial truths were obtained.
    pub truth_kind: TruthKind,
    pub trials: Vec<TrialRow>,
    pub aggregate: Aggregate,
}

/// Aggregate recomputation used both when building reports and when
/// validating reloaded ones.
pub fn aggregate_of(rows: &[TrialRow]) -> Aggregate {
    let n = rows.len();
    if n == 0 {
        return Aggregate {
            mean_rel_mae: f64::NAN,
            std_rel_mae: f64::NAN,
        };
    }
    let mean = rows
        .iter()
        .map(|r| r.relative_abs_error_percent)
        .sum::<f64>()
        / n as f64;
    let std = if n > 1 {
        let ss = rows
            .iter()
            .map(|r| {
                let d = r.relative_abs_error_percent - mean;
                d * d
            })
            .sum::<f64>();
        (ss / (n as f64 - 1.0)).sqrt()
    } else {
        0.0
    };
    Aggregate {
        mean_rel_mae: mean,
        std_rel_mae: std,
    }
}

/// Output encodings for report emission.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = RbigError;
    fn from_str(s: &str) -> Result<ReportFormat> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(RbigError::Usage(format!(
                "unknown report format {other:?} (expected json or csv)"
            ))),
        }
    }
}

/// Fixed CSV header: report-level columns repeated on every trial row.
pub const CSV_HEADER: [&str; 16] = [
    "measure",
    "family",
    "params",
    "dims",
    "n_samples",
    "n_trials",
    "estimator",
    "seed",
    "tool_version",
    "trial",
    "estimate",
    "truth",
    "relative_abs_error_percent",
    "wall_time",
    "mean_rel_mae",
    "std_rel_mae",
];

fn f(v: f64) -> String {
    // 17 significant digits: enough to round-trip any finite f64.
    format!("{v:.16e}")
}

/// Serializes reports to the requested format as a byte buffer.
pub fn render_reports(reports: &[ExperimentReport], format: ReportFormat) -> Result<Vec<u8>> {
    if reports.is_empty() {
        return Err(RbigError::Usage("no reports to emit".into()));
    }
    match format {
        ReportFormat::Json => {
            let mut buf = serde_json::to_vec_pretty(reports)?;
            buf.push(b'\n');
            Ok(buf)
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_HEADER)
                .map_err(|e| RbigError::Io(std::io::Error::other(e)))?;
            for r in reports {
                for t in &r.trials {
                    w.write_record([
                        r.measure.to_string(),
                        r.family.to_string(),
                        r.params.to_string(),
                        r.dims.to_string(),
                        r.n_samples.to_string(),
                        r.n_trials.to_string(),
                        r.estimator_id.to_string(),
                        r.seed.to_string(),
                        r.tool_version.clone(),
                        t.trial.to_string(),
                        f(t.estimate),
                        f(t.truth),
                        f(t.relative_abs_error_percent),
                        f(t.wall_time),
                        f(r.aggregate.mean_rel_mae),
                        f(r.aggregate.std_rel_mae),
                    ])
                    .map_err(|e| RbigError::Io(std::io::Error::other(e)))?;
                }
            }
            w.into_inner()
                .map_err(|e| RbigError::Io(std::io::Error::other(e)))
        }
    }
}

/// Writes reports to a file, or to standard output when `path` is None.
pub fn emit_reports(
    reports: &[ExperimentReport],
    format: ReportFormat,
    path: Option<&Path>,
) -> Result<()> {
    let bytes = render_reports(reports, format)?;
    match path {
        Some(p) => std::fs::write(p, bytes)?,
        None => std::io::stdout().write_all(&bytes)?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report(trials: usize) -> ExperimentReport {
        let rows: Vec<TrialRow> = (0..trials)
            .map(|t| TrialRow {
                trial: t,
                estimate: 1.0 + t as f64 * 0.01,
                truth: 1.0,
                relative_abs_error_percent: t as f64,
                wall_time: 0.5,
            })
            .collect();
        let aggregate = aggregate_of(&rows);
        ExperimentReport {
            measure: Measure::Tc,
            family: Family::GaussianRandomCov,
            params: serde_json::json!({}),
            dims: 3,
            n_samples: 1000,
            n_trials: trials,
            estimator_id: EstimatorId::Rbig,
            seed: 42,
            tool_version: TOOL_VERSION.to_string(),
            truth_kind: TruthKind::Analytic,
            trials: rows,
            aggregate,
        }
    }

    #[test]
    fn aggregates_match_hand_computation() {
        let a = aggregate_of(&sample_report(5).trials);
        // errors 0,1,2,3,4: mean 2, sample std sqrt(2.5).
        assert!((a.mean_rel_mae - 2.0).abs() < 1e-15);
        assert!((a.std_rel_mae - 2.5f64.sqrt()).abs() < 1e-15);
        let single = aggregate_of(&sample_report(1).trials);
        assert_eq!(single.std_rel_mae, 0.0);
    }

    #[test]
    fn json_round_trip_preserves_aggregates_exactly() {
        let reports = vec![sample_report(5), sample_report(3)];
        let bytes = render_reports(&reports, ReportFormat::Json).unwrap();
        let reloaded: Vec<ExperimentReport> = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(reloaded.len(), 2);
        for (orig, back) in reports.iter().zip(reloaded.iter()) {
            let recomputed = aggregate_of(&back.trials);
            assert!((recomputed.mean_rel_mae - orig.aggregate.mean_rel_mae).abs() < 1e-12);
            assert!((recomputed.std_rel_mae - orig.aggregate.std_rel_mae).abs() < 1e-12);
            assert_eq!(orig, back);
        }
    }

    #[test]
    fn csv_has_header_plus_one_row_per_trial() {
        let reports = vec![sample_report(5)];
        let bytes = render_reports(&reports, ReportFormat::Csv).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 6);
        assert!(lines[0].starts_with("measure,family,params,"));
        assert!(lines[1].contains("tc"));
        assert!(lines[1].contains("gaussian_random_cov"));
    }

    #[test]
    fn csv_floats_round_trip() {
        let mut r = sample_report(1);
        r.trials[0].estimate = std::f64::consts::PI * 1e-7;
        let bytes = render_reports(&[r.clone()], ReportFormat::Csv).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let row = text.lines().nth(1).unwrap();
        let fields: Vec<&str> = row.split(',').collect();
        // params is "{}" (no internal comma in this test), estimate is
        // field 10.
        let got: f64 = fields[10].parse().unwrap();
        assert_eq!(got, r.trials[0].estimate);
    }

    #[test]
    fn empty_report_list_is_a_usage_error() {
        assert!(matches!(
            render_reports(&[], ReportFormat::Json),
            Err(RbigError::Usage(_))
        ));
    }
}
