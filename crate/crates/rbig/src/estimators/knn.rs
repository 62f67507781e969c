//! Kozachenko–Leonenko k-nearest-neighbor baseline. Entropy from k-th
//! neighbor distances; total correlation and mutual information from
//! entropy differences; KL divergence from the two-sample neighbor-ratio
//! estimator. Exact neighbor search: sorted scan in one dimension, brute
//! force (parallelized) otherwise.

use std::time::Instant;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::data::DataMatrix;
use crate::error::{RbigError, Result};
use crate::special::{digamma, log_gamma};

use super::{EstimatorId, MeasureEstimate};

/// Conventional default neighbor count.
pub const DEFAULT_KNN_K: usize = 3;

/// Zero neighbor distances (duplicate points) are clamped to this fraction
/// of the data range before the logarithm.
const DUP_REL: f64 = 1e-12;

fn check_k(n: usize, k: usize) -> Result<()> {
    if k < 1 {
        return Err(RbigError::Config("k must be >= 1".into()));
    }
    if n <= k {
        return Err(RbigError::Data(format!(
            "need more than k = {k} samples, got {n}"
        )));
    }
    Ok(())
}

/// Largest per-dimension range, used to scale the duplicate-distance floor.
fn max_range(m: &DMatrix<f64>) -> Result<f64> {
    let mut scale = 0.0f64;
    for j in 0..m.ncols() {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in m.column(j).iter() {
            if !v.is_finite() {
                return Err(RbigError::Data(format!("non-finite value {v} in sample")));
            }
            lo = lo.min(v);
            hi = hi.max(v);
        }
        scale = scale.max(hi - lo);
    }
    if !(scale > 0.0) {
        return Err(RbigError::DegenerateMarginal(
            "all points identical; neighbor distances are all zero".into(),
        ));
    }
    Ok(scale)
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        let d = x - y;
        acc += d * d;
    }
    acc
}

/// Keeps the k smallest values seen, largest first dropped.
fn push_best(best: &mut [f64], v: f64) {
    let k = best.len();
    if v >= best[k - 1] {
        return;
    }
    let mut i = k - 1;
    while i > 0 && best[i - 1] > v {
        best[i] = best[i - 1];
        i -= 1;
    }
    best[i] = v;
}

/// k-th nearest-neighbor distance of every row to the other rows of the
/// same matrix (self excluded), exact brute force over contiguous points.
fn kth_same_set(m: &DMatrix<f64>, k: usize) -> Vec<f64> {
    let n = m.nrows();
    let d = m.ncols();
    if d == 1 {
        return kth_same_set_1d(m.column(0).as_slice(), k);
    }
    // Transpose so each point is one contiguous column slice.
    let pts = m.transpose();
    let flat = pts.as_slice();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let a = &flat[i * d..(i + 1) * d];
            let mut best = vec![f64::INFINITY; k];
            for j in 0..n {
                if j == i {
                    continue;
                }
                push_best(&mut best, dist2(a, &flat[j * d..(j + 1) * d]));
            }
            best[k - 1].sqrt()
        })
        .collect()
}

/// k-th nearest-neighbor distance of every query row to the reference
/// rows (no self exclusion; the sets are distinct samples).
fn kth_cross_set(queries: &DMatrix<f64>, refs: &DMatrix<f64>, k: usize) -> Vec<f64> {
    let n = queries.nrows();
    let m = refs.nrows();
    let d = queries.ncols();
    if d == 1 {
        return kth_cross_set_1d(
            queries.column(0).as_slice(),
            refs.column(0).as_slice(),
            k,
        );
    }
    let q = queries.transpose();
    let r = refs.transpose();
    let qf = q.as_slice();
    let rf = r.as_slice();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let a = &qf[i * d..(i + 1) * d];
            let mut best = vec![f64::INFINITY; k];
            for j in 0..m {
                push_best(&mut best, dist2(a, &rf[j * d..(j + 1) * d]));
            }
            best[k - 1].sqrt()
        })
        .collect()
}

/// 1D same-set path: after sorting, each point's k nearest neighbors lie
/// among its k sorted predecessors and k successors; merge the two runs.
fn kth_same_set_1d(values: &[f64], k: usize) -> Vec<f64> {
    let n = values.len();
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let mut out = vec![0.0; n];
    // Map each original value to a sorted position; ties take successive
    // positions, which is equivalent for distance purposes.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| values[a].total_cmp(&values[b]));
    for (pos, &orig) in order.iter().enumerate() {
        let v = sorted[pos];
        let mut left = pos;
        let mut right = pos + 1;
        let mut kth = 0.0;
        for _ in 0..k {
            let dl = if left > 0 {
                v - sorted[left - 1]
            } else {
                f64::INFINITY
            };
            let dr = if right < n {
                sorted[right] - v
            } else {
                f64::INFINITY
            };
            if dl <= dr {
                kth = dl;
                left -= 1;
            } else {
                kth = dr;
                right += 1;
            }
        }
        out[orig] = kth;
    }
    out
}

/// 1D cross-set path: binary-search the query into the sorted references,
/// then widen outward k steps.
fn kth_cross_set_1d(queries: &[f64], refs: &[f64], k: usize) -> Vec<f64> {
    let mut sorted = refs.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let m = sorted.len();
    queries
        .iter()
        .map(|&v| {
            let mut right = sorted.partition_point(|&r| r < v);
            let mut left = right;
            let mut kth = 0.0;
            for _ in 0..k {
                let dl = if left > 0 {
                    v - sorted[left - 1]
                } else {
                    f64::INFINITY
                };
                let dr = if right < m {
                    sorted[right] - v
                } else {
                    f64::INFINITY
                };
                if dl <= dr {
                    kth = dl;
                    left -= 1;
                } else {
                    kth = dr;
                    right += 1;
                }
            }
            kth
        })
        .collect()
}

/// Log volume of the d-dimensional unit Euclidean ball:
/// (d/2)·ln π − lnΓ(d/2 + 1).
fn ln_unit_ball(d: usize) -> Result<f64> {
    Ok(d as f64 / 2.0 * std::f64::consts::PI.ln() - log_gamma(d as f64 / 2.0 + 1.0)?)
}

/// Sum of logs of the distances, clamping zeros (duplicates) to
/// DUP_REL·scale with a warning.
fn sum_ln_clamped(dists: &[f64], scale: f64, what: &str) -> f64 {
    let floor = DUP_REL * scale;
    let mut clamped = 0usize;
    let mut sum = 0.0;
    for &e in dists {
        if e > 0.0 {
            sum += e.ln();
        } else {
            sum += floor.ln();
            clamped += 1;
        }
    }
    if clamped > 0 {
        log::warn!(
            "{what}: {clamped} duplicate points produced zero neighbor \
             distances; clamped to {floor:.3e}"
        );
    }
    sum
}

/// Core entropy value: ψ(N) − ψ(k) + ln V_D + (D/N)·Σ ln ε_i.
fn entropy_core(m: &DMatrix<f64>, k: usize) -> Result<f64> {
    let n = m.nrows();
    let d = m.ncols();
    check_k(n, k)?;
    let scale = max_range(m)?;
    let dists = kth_same_set(m, k);
    let sum_ln = sum_ln_clamped(&dists, scale, "entropy");
    Ok(digamma(n as f64)? - digamma(k as f64)? + ln_unit_ball(d)? + d as f64 / n as f64 * sum_ln)
}

fn finish(value: f64, t0: Instant) -> Result<MeasureEstimate> {
    MeasureEstimate {
        value,
        estimator_id: EstimatorId::Knn,
        n_layers_used: None,
        noise_floor: None,
        wall_time: t0.elapsed().as_secs_f64(),
    }
    .ensure_finite()
}

/// Nearest-neighbor differential entropy.
pub fn knn_entropy(data: &DataMatrix, k: usize) -> Result<MeasureEstimate> {
    let t0 = Instant::now();
    let value = entropy_core(&data.0, k)?;
    finish(value, t0)
}

/// Total correlation as the entropy decomposition Σ H(x_i) − H(x), every
/// entropy estimated with the same k.
pub fn knn_total_correlation(data: &DataMatrix, k: usize) -> Result<MeasureEstimate> {
    let t0 = Instant::now();
    let joint = entropy_core(&data.0, k)?;
    let mut marginal_sum = 0.0;
    for j in 0..data.dims() {
        let col = data.0.column(j).into_owned();
        let col_m = DMatrix::from_column_slice(col.len(), 1, col.as_slice());
        marginal_sum += entropy_core(&col_m, k)?;
    }
    finish(marginal_sum - joint, t0)
}

/// Mutual information as H(x) + H(y) − H([x, y]).
pub fn knn_mutual_information(
    x_data: &DataMatrix,
    y_data: &DataMatrix,
    k: usize,
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
    let value =
        entropy_core(&x_data.0, k)? + entropy_core(&y_data.0, k)? - entropy_core(&joint.0, k)?;
    finish(value, t0)
}

/// Two-sample KL divergence of y's distribution from x's distribution:
/// (D/N)·Σ ln(ν_k(i)/ρ_k(i)) + ln(M/(N−1)), where ρ_k is each y-point's
/// k-th neighbor distance within y (self excluded) and ν_k its k-th
/// neighbor distance into x. Same argument order as the other KL
/// estimators.
pub fn knn_kl(y_data: &DataMatrix, x_data: &DataMatrix, k: usize) -> Result<MeasureEstimate> {
    if y_data.dims() != x_data.dims() {
        return Err(RbigError::Data(format!(
            "dimension mismatch: y has {} columns, x has {}",
            y_data.dims(),
            x_data.dims()
        )));
    }
    let t0 = Instant::now();
    let n = y_data.n_samples();
    let m = x_data.n_samples();
    check_k(n, k)?;
    if m < k {
        return Err(RbigError::Data(format!(
            "reference set needs at least k = {k} samples, got {m}"
        )));
    }
    let scale = max_range(&y_data.0)?.max(max_range(&x_data.0)?);
    let rho = kth_same_set(&y_data.0, k);
    let nu = kth_cross_set(&y_data.0, &x_data.0, k);
    let sum = sum_ln_clamped(&nu, scale, "kl cross distances")
        - sum_ln_clamped(&rho, scale, "kl within distances");
    let d = y_data.dims() as f64;
    let value = d / n as f64 * sum + (m as f64 / (n as f64 - 1.0)).ln();
    finish(value, t0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::HALF_LN_2PI_E;
    use crate::synth::{sample_gaussian_random_cov, Measure};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;
    use rand_distr::StandardNormal;

    fn normal_matrix(n: usize, d: usize, seed: u64) -> DataMatrix {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        DataMatrix::from_matrix(DMatrix::from_fn(n, d, |_, _| {
            rng.sample::<f64, _>(StandardNormal)
        }))
    }

    /// Brute-force reference for the sorted 1D shortcut.
    fn naive_same_set_1d(values: &[f64], k: usize) -> Vec<f64> {
        let n = values.len();
        (0..n)
            .map(|i| {
                let mut d: Vec<f64> = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| (values[i] - values[j]).abs())
                    .collect();
                d.sort_unstable_by(f64::total_cmp);
                d[k - 1]
            })
            .collect()
    }

    #[test]
    fn sorted_1d_path_matches_naive_search() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let values: Vec<f64> = (0..300).map(|_| rng.gen::<f64>() * 4.0 - 2.0).collect();
        for k in [1, 3, 7] {
            let fast = kth_same_set_1d(&values, k);
            let slow = naive_same_set_1d(&values, k);
            for (a, b) in fast.iter().zip(slow.iter()) {
                assert!((a - b).abs() < 1e-12, "{a} vs {b} (k={k})");
            }
        }
    }

    #[test]
    fn cross_1d_path_matches_naive_search() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let q: Vec<f64> = (0..100).map(|_| rng.gen::<f64>()).collect();
        let r: Vec<f64> = (0..150).map(|_| rng.gen::<f64>()).collect();
        for k in [1, 3] {
            let fast = kth_cross_set_1d(&q, &r, k);
            for (i, &v) in q.iter().enumerate() {
                let mut d: Vec<f64> = r.iter().map(|&x| (v - x).abs()).collect();
                d.sort_unstable_by(f64::total_cmp);
                assert!((fast[i] - d[k - 1]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn entropy_of_1d_standard_normal() {
        let data = normal_matrix(100_000, 1, 17);
        let est = knn_entropy(&data, 3).unwrap();
        assert!(
            (est.value - HALF_LN_2PI_E).abs() < 0.02,
            "{} vs {HALF_LN_2PI_E}",
            est.value
        );
        assert_eq!(est.estimator_id, EstimatorId::Knn);
    }

    #[test]
    fn entropy_of_multivariate_normal_uses_brute_path() {
        let data = normal_matrix(8_000, 2, 19);
        let est = knn_entropy(&data, 3).unwrap();
        let want = 2.0 * HALF_LN_2PI_E;
        assert!((est.value - want).abs() < 0.05, "{} vs {want}", est.value);
    }

    #[test]
    fn tc_tracks_gaussian_truth_in_low_dimension() {
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        let (data, truths) = sample_gaussian_random_cov(3, 10_000, &mut rng).unwrap();
        let truth = truths.spec_for(Measure::Tc).unwrap().truth;
        let est = knn_total_correlation(&data, DEFAULT_KNN_K).unwrap();
        let rel = (est.value - truth).abs() / truth;
        assert!(rel < 0.10, "tc = {}, truth = {truth}", est.value);
    }

    #[test]
    fn mi_of_correlated_pair() {
        let rho = 0.6f64;
        let n = 20_000;
        let mut rng = ChaCha12Rng::seed_from_u64(29);
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
        let est = knn_mutual_information(&x, &y, 3).unwrap();
        let want = -0.5 * (1.0 - rho * rho).ln();
        assert!((est.value - want).abs() < 0.03, "{} vs {want}", est.value);
    }

    #[test]
    fn kl_of_mean_shifted_1d_gaussians() {
        let n = 20_000;
        let x = normal_matrix(n, 1, 31);
        let mut y = normal_matrix(n, 1, 37);
        for v in y.0.iter_mut() {
            *v += 0.4;
        }
        let est = knn_kl(&y, &x, 3).unwrap();
        assert!((est.value - 0.08).abs() < 0.04, "{}", est.value);

        let same = knn_kl(&x, &x, 3);
        // Same set as both arguments: every cross distance includes the
        // point itself (zero), which the clamp turns into a huge negative
        // sum; the call still succeeds and warns. Distinct draws of the
        // same distribution are the meaningful zero-divergence case.
        assert!(same.is_ok());
        let a = normal_matrix(n, 1, 41);
        let b = normal_matrix(n, 1, 43);
        let est0 = knn_kl(&a, &b, 3).unwrap();
        assert!(est0.value.abs() < 0.05, "{}", est0.value);
    }

    #[test]
    fn duplicates_are_clamped_not_fatal() {
        let mut flat = vec![0.5; 40];
        flat.extend((0..160).map(|i| i as f64 / 160.0));
        let data = DataMatrix::from_row_major(200, 1, &flat).unwrap();
        let est = knn_entropy(&data, 3).unwrap();
        assert!(est.value.is_finite());
    }

    #[test]
    fn degenerate_and_misuse_errors() {
        let constant = DataMatrix::from_row_major(50, 1, &[1.0; 50]).unwrap();
        assert!(matches!(
            knn_entropy(&constant, 3),
            Err(RbigError::DegenerateMarginal(_))
        ));
        let tiny = DataMatrix::from_row_major(3, 1, &[0.0, 1.0, 2.0]).unwrap();
        assert!(knn_entropy(&tiny, 3).is_err());
        assert!(knn_entropy(&tiny, 0).is_err());
        let x = normal_matrix(100, 2, 1);
        let y = normal_matrix(100, 3, 2);
        assert!(knn_kl(&y, &x, 3).is_err());
        let z = normal_matrix(50, 2, 3);
        assert!(knn_mutual_information(&x, &z, 3).is_err());
    }
}
