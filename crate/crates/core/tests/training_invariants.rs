use std::time::Instant;

use intentrec::data::{synth_generate, SynthConfig};
use intentrec::model::{GaussianState, Model, ModelConfig};
use intentrec::training::{
    backward, grad_check, kl_divergence, total_loss, train, Checkpoint, GradCheckConfig,
    LossWeights,
};
use intentrec::Config;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[test]
fn kl_is_nonnegative_on_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10_000 {
        let dim = rng.random_range(1..16);
        let state = GaussianState {
            mu: (0..dim).map(|_| rng.random_range(-5.0..5.0)).collect(),
            log_var: (0..dim).map(|_| rng.random_range(-10.0..10.0)).collect(),
        };
        assert!(kl_divergence(&state) >= -1e-9);
    }
}

#[test]
fn kl_reference_values() {
    assert_eq!(kl_divergence(&GaussianState::standard(7)), 0.0);
    let one = GaussianState {
        mu: vec![1.0],
        log_var: vec![0.0],
    };
    assert!((kl_divergence(&one) - 0.5).abs() <= 1e-9);
}

#[test]
fn gradients_match_finite_differences_over_five_seeds() {
    let start = Instant::now();
    for seed in 0..5 {
        let report = grad_check(&GradCheckConfig {
            seed,
            ..Default::default()
        })
        .unwrap();
        assert!(report.passed(), "seed {seed}: {report:#?}");
        assert!(report.max_rel_error() <= 1e-4);
    }
    assert!(start.elapsed().as_secs_f64() < 30.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn backward_is_finite(
        seed in any::<u64>(),
        dim in 1usize..10,
        k in 1usize..6,
        n in 2usize..30,
        len in 2usize..15,
        lambda in 0.0f64..2.0,
        beta in 0.0f64..2.0,
    ) {
        let model = Model::new(ModelConfig::new(dim, k, n, 16).unwrap(), seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let seq: Vec<usize> = (0..len).map(|_| rng.random_range(0..n)).collect();
        let eps: Vec<Vec<f64>> = (0..len - 1)
            .map(|_| (0..dim).map(|_| rng.sample(StandardNormal)).collect())
            .collect();
        let w = LossWeights { lambda_elbo: lambda, beta };
        let (loss, grads) = backward(&model, &seq, &eps, w).unwrap();
        prop_assert!(grads.all_finite());
        prop_assert!(loss.total.is_finite());

        let again = total_loss(&model, &seq, &eps, w).unwrap();
        prop_assert_eq!(loss, again);
        let composed = again.next_item + lambda * (again.recon + beta * again.kl);
        prop_assert!((again.total - composed).abs() <= 1e-9);
    }
}

#[test]
fn training_lowers_the_loss_on_planted_intents() {
    let data = synth_generate(&SynthConfig {
        n_users: 50,
        n_items: 40,
        n_topics: 4,
        seed: 2,
    })
    .unwrap();
    let cfg = Config {
        dim: 16,
        epochs: 200,
        ..Config::default()
    };
    let out = train(&data, &cfg).unwrap();
    assert_eq!(out.log.len(), 200);
    let first = out.log.first().unwrap().total;
    let last = out.log.last().unwrap().total;
    assert!(last < first, "first {first}, last {last}");
}

#[test]
fn training_is_reproducible_through_checkpoints() {
    let data = synth_generate(&SynthConfig {
        n_users: 20,
        n_items: 20,
        n_topics: 2,
        seed: 4,
    })
    .unwrap();
    let cfg = Config {
        dim: 6,
        epochs: 5,
        ..Config::default()
    };
    let a = train(&data, &cfg).unwrap();
    let b = train(&data, &cfg).unwrap();
    assert_eq!(a.log, b.log);
    let bytes = Checkpoint::new(cfg.clone(), a.model).to_bytes().unwrap();
    assert_eq!(
        bytes,
        Checkpoint::new(cfg.clone(), b.model).to_bytes().unwrap()
    );
    let back = Checkpoint::from_bytes(&bytes).unwrap();
    assert_eq!(back.to_bytes().unwrap(), bytes);

    let other = train(&data, &Config { seed: 43, ..cfg }).unwrap();
    assert_ne!(other.log, a.log);
}
