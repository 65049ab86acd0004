//! Sequential-VAE evidence bound plus the next-item ranking loss.

use crate::error::{Error, Result};
use crate::linalg::log_sum_exp;
use crate::model::{ForwardPass, GaussianState, Model, UserRepresentation};

/// Weights combining the next-item loss with the negative evidence bound:
/// `total = next_item + lambda_elbo · (recon + beta · kl)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossWeights {
    pub lambda_elbo: f64,
    pub beta: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            lambda_elbo: 0.1,
            beta: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LossBreakdown {
    /// Negated reconstruction log-likelihood, summed over steps.
    pub recon: f64,
    /// KL to the standard-normal prior, summed over steps.
    pub kl: f64,
    pub next_item: f64,
    pub total: f64,
}

impl LossBreakdown {
    pub fn compose(recon: f64, kl: f64, next_item: f64, w: LossWeights) -> Self {
        Self {
            recon,
            kl,
            next_item,
            total: next_item + w.lambda_elbo * (recon + w.beta * kl),
        }
    }
}

/// `log softmax(E h)[target]` over the full catalog.
pub fn recon_log_likelihood(model: &Model, h: &[f64], target: usize) -> Result<f64> {
    model.embed_item(target)?;
    let logits = model.params.item_embeddings.matvec(h);
    Ok(logits[target] - log_sum_exp(&logits))
}

/// Closed-form `KL(N(mu, diag(exp(log_var))) || N(0, I))`.
pub fn kl_divergence(state: &GaussianState) -> f64 {
    0.5 * state
        .mu
        .iter()
        .zip(&state.log_var)
        .map(|(m, lv)| lv.exp() + m * m - 1.0 - lv)
        .sum::<f64>()
}

/// Single-sample estimate of `Σ_t log p(i_t | h_t)` and the summed KL.
/// Returns `(recon_ll, kl)`.
pub fn elbo_loss(
    model: &Model,
    states: &[GaussianState],
    samples: &[Vec<f64>],
    targets: &[usize],
) -> Result<(f64, f64)> {
    if states.len() != samples.len() || states.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            what: "evidence bound inputs",
            expected: states.len(),
            got: if samples.len() != states.len() {
                samples.len()
            } else {
                targets.len()
            },
        });
    }
    let mut recon_ll = 0.0;
    for (h, &target) in samples.iter().zip(targets) {
        recon_ll += recon_log_likelihood(model, h, target)?;
    }
    let kl = states.iter().map(kl_divergence).sum();
    Ok((recon_ll, kl))
}

/// Cross-entropy of `softmax(score_all(u))` at the target.
pub fn next_item_loss(model: &Model, user: &UserRepresentation, target: usize) -> Result<f64> {
    model.embed_item(target)?;
    let logits = model.score_all(user);
    Ok(log_sum_exp(&logits) - logits[target])
}

/// Splits a training sequence into the history the model reads and the
/// held-out next item.
pub fn split_target(sequence: &[usize]) -> Result<(&[usize], usize)> {
    match sequence.split_last() {
        Some((&target, prefix)) if !prefix.is_empty() => Ok((prefix, target)),
        _ => Err(Error::SequenceTooShort {
            len: sequence.len(),
            min: 2,
        }),
    }
}

pub(crate) fn breakdown_from_forward(
    model: &Model,
    prefix: &[usize],
    target: usize,
    fwd: &ForwardPass,
    w: LossWeights,
) -> Result<LossBreakdown> {
    let (recon_ll, kl) = elbo_loss(model, &fwd.states, &fwd.samples, prefix)?;
    let next = next_item_loss(model, &fwd.user, target)?;
    Ok(LossBreakdown::compose(-recon_ll, kl, next, w))
}

/// Loss on one sequence: the evidence bound runs over every item but the
/// last, which is the next-item target. `eps` holds one noise vector per
/// history step (`sequence.len() - 1` of them).
pub fn total_loss(
    model: &Model,
    sequence: &[usize],
    eps: &[Vec<f64>],
    w: LossWeights,
) -> Result<LossBreakdown> {
    let (prefix, target) = split_target(sequence)?;
    let fwd = model.forward(prefix, eps)?;
    breakdown_from_forward(model, prefix, target, &fwd, w)
}
