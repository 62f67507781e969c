//! Scratch diagnostics; not part of the library surface.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rbig::estimators::{estimate_entropy, estimate_mutual_information};
use rbig::model::{fit, RbigConfig};
use rbig::synth::{make_mi_pair, sample_rotated_uniform, MiKind};

fn main() {
    let n = 10_000usize;

    // --- New Gaussian MI construction: error at d = 10, 50 ---------------
    for d in [10usize, 50] {
        let mut rng = ChaCha12Rng::seed_from_u64(900 + d as u64);
        let (x, y, truths) = make_mi_pair(MiKind::Gaussian, d, n, &mut rng).unwrap();
        let truth = truths.mi.unwrap().value;
        let cfg = RbigConfig::default();
        let est = estimate_mutual_information(&x, &y, &cfg).unwrap();
        println!(
            "MI gauss d={d}: truth={truth:.4} est={:.4} rel={:.2}% layers={:?}",
            est.value,
            100.0 * (est.value - truth).abs() / truth,
            est.n_layers_used
        );
    }

    // --- Rotated uniform D=100: where do the nats go? ---------------------
    for (dim, seed) in [(50usize, 777u64), (100, 778)] {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let (data, truths) = sample_rotated_uniform(dim, n, &mut rng).unwrap();
        let t_truth = truths.t.as_ref().unwrap().value;
        let h_truth = truths.h.as_ref().unwrap().value;

        for max_layers in [100usize, 300] {
            let cfg = RbigConfig {
                max_layers,
                ..RbigConfig::default()
            };
            let model = fit(&data, &cfg).unwrap();
            let t_hat = model.total_correlation();
            let tail: f64 = model
                .layers
                .iter()
                .rev()
                .take(10)
                .map(|l| l.delta_t)
                .sum::<f64>()
                / 10.0;
            let h_est = estimate_entropy(&data, &cfg).unwrap();
            println!(
                "rot-unif D={dim} max_layers={max_layers}: layers={} stop={:?} floor={:.4} \
                 T^={t_hat:.2} (truth {t_truth:.2}, rel {:.2}%) last10_mean_dT={tail:.4} \
                 H^={:.2} (truth {h_truth:.2}, rel {:.2}%)",
                model.layers.len(),
                model.stop_reason,
                model.noise_floor,
                100.0 * (t_hat - t_truth).abs() / t_truth,
                h_est.value,
                100.0 * (h_est.value - h_truth).abs() / h_truth.abs(),
            );
        }
    }
}
