use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::data::{batches, leave_one_out_split, Dataset, Split};
use crate::error::{Error, Result};
use crate::model::{most_recent, Model, ModelConfig};
use crate::rng::{stream, tags};

use super::adam::{adam_step, OptimizerState};
use super::backward::{backward, Gradients};
use super::loss::{total_loss, LossBreakdown, LossWeights};

/// Mean loss components over the sequences seen in one epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub recon: f64,
    pub kl: f64,
    pub next_item: f64,
    pub total: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: Model,
    pub log: Vec<EpochLog>,
}

/// KL weight for a 0-based epoch: linear ramp from 0 to `beta_max` over
/// `kl_warmup_epochs`, constant afterwards.
pub fn kl_weight(cfg: &Config, epoch: usize) -> f64 {
    if cfg.kl_warmup_epochs == 0 {
        cfg.beta_max
    } else {
        cfg.beta_max * (epoch as f64 / cfg.kl_warmup_epochs as f64).min(1.0)
    }
}

pub fn model_config(cfg: &Config, n_items: usize) -> Result<ModelConfig> {
    ModelConfig::new(cfg.dim, cfg.n_intents, n_items, cfg.max_len)
}

/// Initializes a model from `cfg.seed` and trains it on the leave-one-out
/// training prefixes of `dataset`.
pub fn train(dataset: &Dataset, cfg: &Config) -> Result<TrainOutcome> {
    cfg.validate()?;
    let split = leave_one_out_split(dataset);
    let model = Model::new(model_config(cfg, dataset.n_items())?, cfg.seed);
    train_model(model, &split, cfg)
}

/// Mini-batch training of an existing model.
///
/// Every epoch, each user with at least two training items contributes one
/// seeded random crop of its training prefix, cut after a uniformly drawn
/// position, keeping the most recent `max_len + 1` items. The evidence bound
/// runs over all but the last item of the crop, which is the next-item
/// target. The epoch log is the mean loss of the uncropped prefixes, measured
/// batch by batch just before each update with separate noise draws, so
/// epochs stay comparable whatever the crops were.
pub fn train_model(mut model: Model, split: &Split, cfg: &Config) -> Result<TrainOutcome> {
    cfg.validate()?;
    let window = model.config.max_len + 1;
    let sequences: Vec<Option<&[usize]>> = split
        .users
        .iter()
        .map(|u| Some(u.train.as_slice()).filter(|s| s.len() >= 2))
        .collect();
    if sequences.iter().all(Option::is_none) {
        return Err(Error::EmptyDataset(
            "no user has a training prefix of at least two items".into(),
        ));
    }

    let dim = model.dim();
    let mut opt = OptimizerState::new(&model.params, cfg.lr);
    let mut noise = stream(cfg.seed, &[tags::NOISE]);
    let mut crops = stream(cfg.seed, &[tags::CROP]);
    let mut probe_noise = stream(cfg.seed, &[tags::NOISE, tags::CROP]);
    let draw = |rng: &mut ChaCha8Rng, steps: usize| -> Vec<Vec<f64>> {
        (0..steps)
            .map(|_| (0..dim).map(|_| rng.sample(StandardNormal)).collect())
            .collect()
    };
    let mc = cfg.mc_samples;
    let mut log = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        let weights = LossWeights {
            lambda_elbo: cfg.lambda_elbo,
            beta: kl_weight(cfg, epoch),
        };
        let mut sum = LossBreakdown::default();
        let mut seen = 0usize;
        for batch in batches(split, cfg.batch_size, cfg.seed, epoch as u64) {
            let mut grad = Gradients::zeros_like(&model);
            let mut n = 0usize;
            for full in batch.iter().filter_map(|&ix| sequences[ix]) {
                let whole = most_recent(full, window);
                let eps = draw(&mut probe_noise, whole.len() - 1);
                let loss = total_loss(&model, whole, &eps, weights)?;
                sum.recon += loss.recon;
                sum.kl += loss.kl;
                sum.next_item += loss.next_item;
                sum.total += loss.total;
                seen += 1;

                let end = crops.random_range(2..=full.len());
                let seq = most_recent(&full[..end], window);
                for _ in 0..mc {
                    let eps = draw(&mut noise, seq.len() - 1);
                    let (_, g) = backward(&model, seq, &eps, weights)?;
                    grad.add_scaled(1.0 / mc as f64, &g);
                }
                n += 1;
            }
            if n == 0 {
                continue;
            }
            grad.scale(1.0 / n as f64);
            adam_step(&mut model.params, &grad, &mut opt)?;
            if !model.params.all_finite() {
                return Err(Error::NonFinite("parameters after update"));
            }
        }
        let denom = seen.max(1) as f64;
        log.push(EpochLog {
            epoch,
            recon: sum.recon / denom,
            kl: sum.kl / denom,
            next_item: sum.next_item / denom,
            total: sum.total / denom,
        });
    }
    Ok(TrainOutcome { model, log })
}

pub fn write_loss_csv<W: std::io::Write>(log: &[EpochLog], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in log {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_loss_csv<R: std::io::Read>(input: R) -> Result<Vec<EpochLog>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}
