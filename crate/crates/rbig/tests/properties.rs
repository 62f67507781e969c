//! Property-based invariants across the library: monotone marginal maps
//! with exact-ish round trips, orthogonal rotations, special-function
//! identities, entropy shift/scale laws, and seed-derivation stability.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use rbig::marginal::{
    fit_marginal_map, gaussianize_forward, gaussianize_inverse, marginal_entropy,
    EntropyEstimator,
};
use rbig::rotation::{orthogonality_defect, random_rotation};
use rbig::seed::derive_seed;
use rbig::special::{log_beta, log_gamma, std_normal_cdf, std_normal_quantile};

/// A strategy for data vectors with enough spread to fit a marginal map.
fn data_vector() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1e3f64..1e3f64, 20..200).prop_filter(
        "needs at least two distinct values",
        |v| {
            let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            max - min > 1e-6
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn marginal_map_is_monotone(values in data_vector()) {
        let map = fit_marginal_map(&values).unwrap();
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        sorted.dedup();
        let z = gaussianize_forward(&map, &sorted).unwrap();
        for w in z.windows(2) {
            prop_assert!(
                w[1] > w[0],
                "map not strictly increasing: {} then {}",
                w[0],
                w[1]
            );
        }
    }

    #[test]
    fn marginal_map_round_trips(values in data_vector()) {
        let map = fit_marginal_map(&values).unwrap();
        let z = gaussianize_forward(&map, &values).unwrap();
        let back = gaussianize_inverse(&map, &z).unwrap();
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let scale = (max - min).max(1.0);
        for (orig, b) in values.iter().zip(&back) {
            prop_assert!(
                (orig - b).abs() <= 1e-5 * scale,
                "round trip {orig} -> {b} (scale {scale})"
            );
        }
    }

    #[test]
    fn random_rotations_are_orthogonal(seed in any::<u64>(), d in 1usize..12) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let q = random_rotation(d, &mut rng).unwrap();
        prop_assert!(orthogonality_defect(&q) <= 1e-10);
    }

    #[test]
    fn log_beta_is_symmetric_and_matches_gammas(
        a in 0.1f64..50.0,
        b in 0.1f64..50.0,
    ) {
        let ab = log_beta(a, b).unwrap();
        let ba = log_beta(b, a).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-12 * ab.abs().max(1.0));
        let via_gamma = log_gamma(a).unwrap() + log_gamma(b).unwrap() - log_gamma(a + b).unwrap();
        prop_assert!(
            (ab - via_gamma).abs() <= 1e-10 * ab.abs().max(1.0),
            "log_beta({a},{b}) = {ab} vs gammas {via_gamma}"
        );
    }

    #[test]
    fn quantile_and_cdf_are_inverses(p in 1e-10f64..=0.9999999999f64) {
        let x = std_normal_quantile(p).unwrap();
        let p2 = std_normal_cdf(x).unwrap();
        prop_assert!((p - p2).abs() <= 1e-9, "p = {p}, round trip {p2}");
    }

    #[test]
    fn cdf_then_quantile_recovers_x(x in -6.0f64..6.0) {
        let p = std_normal_cdf(x).unwrap();
        let x2 = std_normal_quantile(p).unwrap();
        prop_assert!((x - x2).abs() <= 1e-8 * x.abs().max(1.0), "x = {x}, round trip {x2}");
    }

    #[test]
    fn gamma_recurrence_holds(x in 0.05f64..80.0) {
        // ln Γ(x+1) = ln Γ(x) + ln x
        let lhs = log_gamma(x + 1.0).unwrap();
        let rhs = log_gamma(x).unwrap() + x.ln();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0));
    }

    #[test]
    fn histogram_entropy_is_shift_invariant_and_scales(
        values in data_vector(),
        shift in -100.0f64..100.0,
        log_scale in -3.0f64..3.0,
    ) {
        let h = marginal_entropy(&values, EntropyEstimator::HistogramMm, None).unwrap();
        let shifted: Vec<f64> = values.iter().map(|v| v + shift).collect();
        let hs = marginal_entropy(&shifted, EntropyEstimator::HistogramMm, None).unwrap();
        prop_assert!((h - hs).abs() <= 1e-6, "shift changed entropy: {h} -> {hs}");

        let a = log_scale.exp();
        let scaled: Vec<f64> = values.iter().map(|v| v * a).collect();
        let hsc = marginal_entropy(&scaled, EntropyEstimator::HistogramMm, None).unwrap();
        prop_assert!(
            (hsc - (h + a.ln())).abs() <= 1e-6,
            "scaling by {a}: {h} -> {hsc}, expected {}",
            h + a.ln()
        );
    }

    #[test]
    fn derived_seeds_are_stable_and_sensitive(
        base in any::<u64>(),
        i in 0u64..1000,
        j in 0u64..1000,
    ) {
        let s1 = derive_seed(base, "stream", &[i, j]);
        let s2 = derive_seed(base, "stream", &[i, j]);
        prop_assert_eq!(s1, s2);
        let other = derive_seed(base, "stream", &[i, j + 1]);
        prop_assert_ne!(s1, other);
        let other_label = derive_seed(base, "maerts", &[i, j]);
        prop_assert_ne!(s1, other_label);
    }
}
