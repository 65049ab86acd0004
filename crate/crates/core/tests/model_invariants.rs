use intentrec::linalg::{log_sum_exp, softmax};
use intentrec::model::{GaussianState, Model, ModelConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn small_model(dim: usize, k: usize, n: usize, seed: u64) -> Model {
    Model::new(ModelConfig::new(dim, k, n, 20).unwrap(), seed)
}

fn noise(rng: &mut ChaCha8Rng, steps: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..steps)
        .map(|_| (0..dim).map(|_| rng.sample(StandardNormal)).collect())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn attention_weights_are_a_distribution(
        seed in any::<u64>(),
        dim in 1usize..12,
        k in 1usize..8,
        scale in 0.01f64..50.0,
    ) {
        let mut model = small_model(dim, k, 5, seed);
        model.params.intent_bank.as_mut_slice().iter_mut().for_each(|v| *v *= scale * 10.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q: Vec<f64> = (0..dim).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect();
        let att = model.intent_attention(&q);
        let total: f64 = att.weights.iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-6);
        prop_assert!(att.weights.iter().all(|&a| (0.0..=1.0).contains(&a)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn softmax_ignores_constant_shift(
        logits in prop::collection::vec(-30.0f64..30.0, 1..40),
        shift in -1000.0f64..1000.0,
    ) {
        let base = softmax(&logits);
        let shifted: Vec<f64> = logits.iter().map(|l| l + shift).collect();
        for (a, b) in base.iter().zip(softmax(&shifted)) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
        let lse = log_sum_exp(&logits);
        prop_assert!((log_sum_exp(&shifted) - shift - lse).abs() <= 1e-6);
    }

    #[test]
    fn fusion_stays_between_its_inputs(
        seed in any::<u64>(),
        logit in -20.0f64..20.0,
        dim in 1usize..10,
    ) {
        let mut model = small_model(dim, 3, 4, seed);
        model.params.fusion_logit = logit;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let z: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let mu: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let u = model.fuse(&z, &mu).u;
        let gamma = model.params.gamma();
        prop_assert!(gamma > 0.0 && gamma < 1.0);
        for j in 0..dim {
            let (lo, hi) = (z[j].min(mu[j]), z[j].max(mu[j]));
            prop_assert!(u[j] >= lo - 1e-12 && u[j] <= hi + 1e-12);
        }
    }

    #[test]
    fn contexts_are_causal(
        seed in any::<u64>(),
        seq in prop::collection::vec(0usize..15, 2..20),
        cut in 1usize..20,
    ) {
        let model = small_model(6, 2, 15, seed);
        let cut = cut.min(seq.len());
        let full = model.encode_context(&seq).unwrap();
        let mut altered = seq.clone();
        for item in altered.iter_mut().skip(cut) {
            *item = (*item + 7) % 15;
        }
        let other = model.encode_context(&altered).unwrap();
        prop_assert_eq!(&full[..cut], &other[..cut]);
        prop_assert_eq!(&model.encode_context(&seq[..cut]).unwrap()[..], &full[..cut]);
    }

    #[test]
    fn same_inputs_same_outputs(
        seed in any::<u64>(),
        seq in prop::collection::vec(0usize..10, 1..12),
    ) {
        let a = small_model(5, 3, 10, seed);
        let b = small_model(5, 3, 10, seed);
        prop_assert_eq!(&a.params, &b.params);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eps = noise(&mut rng, seq.len(), 5);
        let fa = a.forward(&seq, &eps).unwrap();
        let fb = b.forward(&seq, &eps).unwrap();
        prop_assert_eq!(fa.user, fb.user);
        prop_assert_eq!(fa.samples, fb.samples);
    }

    #[test]
    fn deterministic_path_matches_zero_noise(
        seed in any::<u64>(),
        seq in prop::collection::vec(0usize..10, 1..12),
    ) {
        let model = small_model(5, 3, 10, seed);
        let eps = vec![vec![0.0; 5]; seq.len()];
        let fwd = model.forward(&seq, &eps).unwrap();
        prop_assert_eq!(model.represent(&seq).unwrap(), fwd.user);
        for (state, h) in fwd.states.iter().zip(&fwd.samples) {
            prop_assert_eq!(&state.mu, h);
        }
    }

    #[test]
    fn log_variance_is_clamped(seed in any::<u64>(), scale in 1.0f64..1e4) {
        let mut model = small_model(4, 2, 6, seed);
        model.params.head_logvar_w.as_mut_slice().iter_mut().for_each(|v| *v *= scale);
        model.params.head_logvar_b.iter_mut().for_each(|v| *v = scale);
        let contexts = model.encode_context(&[0, 1, 2]).unwrap();
        for c in &contexts {
            let state = model.gaussian_heads(c).unwrap();
            prop_assert!(state.log_var.iter().all(|lv| (-10.0..=10.0).contains(lv)));
        }
    }
}

#[test]
fn reparameterized_samples_have_the_right_moments() {
    let state = GaussianState {
        mu: vec![0.0, 1.5, -2.0],
        log_var: vec![0.0, (0.25f64).ln(), (4.0f64).ln()],
    };
    let n = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut sum = [0.0f64; 3];
    let mut sq = [0.0f64; 3];
    for _ in 0..n {
        let eps: Vec<f64> = (0..3).map(|_| rng.sample(StandardNormal)).collect();
        let h = state.reparameterize(&eps).unwrap();
        for j in 0..3 {
            sum[j] += h[j];
            sq[j] += h[j] * h[j];
        }
    }
    for (j, var) in state.variance().into_iter().enumerate() {
        let mean = sum[j] / n as f64;
        let sample_var = sq[j] / n as f64 - mean * mean;
        assert!(
            (mean - state.mu[j]).abs() <= 3.0 * var.sqrt() / (n as f64).sqrt(),
            "mean {mean} vs {}",
            state.mu[j]
        );
        assert!(
            (sample_var / var - 1.0).abs() <= 0.05,
            "variance {sample_var} vs {var}"
        );
    }
}

#[test]
fn noise_length_must_match_sequence() {
    let model = small_model(3, 2, 5, 0);
    assert!(model.forward(&[0, 1, 2], &vec![vec![0.0; 3]; 2]).is_err());
    assert!(model.forward(&[0, 1], &vec![vec![0.0; 2]; 2]).is_err());
}
