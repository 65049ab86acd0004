//! Reverse-mode gradient of [`total_loss`](super::total_loss), derived by hand.
//!
//! The pass walks the forward graph backwards: catalog softmax cross-entropy
//! for the fused representation and for every sampled state, the closed-form
//! KL, pathwise reparameterization, the fusion blend, intent attention, the
//! query projection, both Gaussian heads (with the clamp masked out), and
//! finally backpropagation through time in the recurrent cell.

use std::ops::{Deref, DerefMut};

use crate::error::Result;
use crate::linalg::{axpy, dot, log_sum_exp, softmax};
use crate::model::{Model, ModelParams, LOG_VAR_MAX, LOG_VAR_MIN};

use super::loss::{breakdown_from_forward, split_target, LossBreakdown, LossWeights};

/// Gradient of the loss with respect to every parameter group. Shapes mirror
/// [`ModelParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients(pub ModelParams);

impl Gradients {
    pub fn zeros_like(model: &Model) -> Self {
        Self(ModelParams::zeros(&model.config))
    }

    /// `self += alpha · other`
    pub fn add_scaled(&mut self, alpha: f64, other: &Gradients) {
        for ((_, dst), (_, src)) in self.0.groups_mut().into_iter().zip(other.0.groups()) {
            axpy(alpha, src, dst);
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        for (_, g) in self.0.groups_mut() {
            g.iter_mut().for_each(|v| *v *= alpha);
        }
    }
}

impl Deref for Gradients {
    type Target = ModelParams;

    fn deref(&self) -> &ModelParams {
        &self.0
    }
}

impl DerefMut for Gradients {
    fn deref_mut(&mut self) -> &mut ModelParams {
        &mut self.0
    }
}

/// Loss and exact analytic gradient at the current parameters, holding `eps` fixed.
pub fn backward(
    model: &Model,
    sequence: &[usize],
    eps: &[Vec<f64>],
    w: LossWeights,
) -> Result<(LossBreakdown, Gradients)> {
    let (prefix, target) = split_target(sequence)?;
    let fwd = model.forward(prefix, eps)?;
    let loss = breakdown_from_forward(model, prefix, target, &fwd, w)?;

    let p = &model.params;
    let d = model.dim();
    let steps = prefix.len();
    let mut g = Gradients::zeros_like(model);

    // Next-item cross-entropy: dL/dlogits = softmax - onehot.
    let logits = p.item_embeddings.matvec(&fwd.user.u);
    let mut dlogits = softmax(&logits);
    dlogits[target] -= 1.0;
    g.item_embeddings.add_outer(1.0, &dlogits, &fwd.user.u);
    let mut du = vec![0.0; d];
    p.item_embeddings.matvec_t_add_into(&dlogits, &mut du);

    let mut dmu = vec![vec![0.0; d]; steps];
    let mut dlv = vec![vec![0.0; d]; steps];

    let lambda = w.lambda_elbo;
    if lambda != 0.0 {
        let kl_scale = lambda * w.beta;
        for t in 0..steps {
            let h = &fwd.samples[t];
            let state = &fwd.states[t];

            // Reconstruction: lambda · (softmax(E h) - onehot(i_t)).
            let logits = p.item_embeddings.matvec(h);
            let lse = log_sum_exp(&logits);
            let mut dl: Vec<f64> = logits.iter().map(|l| lambda * (l - lse).exp()).collect();
            dl[prefix[t]] -= lambda;
            g.item_embeddings.add_outer(1.0, &dl, h);
            let mut dh = vec![0.0; d];
            p.item_embeddings.matvec_t_add_into(&dl, &mut dh);

            for j in 0..d {
                let sigma = (0.5 * state.log_var[j]).exp();
                // h = mu + sigma ⊙ eps
                dmu[t][j] += dh[j] + kl_scale * state.mu[j];
                dlv[t][j] +=
                    dh[j] * eps[t][j] * 0.5 * sigma + kl_scale * 0.5 * (sigma * sigma - 1.0);
            }
        }
    }

    // Fusion: u = γ z + (1 - γ) μ_T.
    let gamma = fwd.gamma;
    let pooled = &fwd.attention.pooled;
    let last_mu = &fwd.last_state().mu;
    let dz: Vec<f64> = du.iter().map(|v| gamma * v).collect();
    axpy(1.0 - gamma, &du, &mut dmu[steps - 1]);
    let dgamma: f64 = du
        .iter()
        .zip(pooled.iter().zip(last_mu))
        .map(|(g, (z, m))| g * (z - m))
        .sum();
    g.fusion_logit = dgamma * gamma * (1.0 - gamma);

    // Attention: z = Σ_k a_k Z_k, a = softmax(Z q).
    let bank = &p.intent_bank;
    let weights = &fwd.attention.weights;
    let dweights: Vec<f64> = (0..bank.rows()).map(|k| dot(bank.row(k), &dz)).collect();
    let mean = dot(weights, &dweights);
    let dattn: Vec<f64> = weights
        .iter()
        .zip(&dweights)
        .map(|(a, da)| a * (da - mean))
        .collect();
    g.intent_bank.add_outer(1.0, weights, &dz);
    g.intent_bank.add_outer(1.0, &dattn, &fwd.query);
    let mut dq = vec![0.0; d];
    bank.matvec_t_add_into(&dattn, &mut dq);

    // Query: q = W_q c_T.
    let mut dctx = vec![vec![0.0; d]; steps];
    let last_ctx = &fwd.contexts[steps - 1];
    g.query_proj.add_outer(1.0, &dq, last_ctx);
    p.query_proj.matvec_t_add_into(&dq, &mut dctx[steps - 1]);

    // Gaussian heads. The clamp passes gradient only inside its range.
    for t in 0..steps {
        let c = &fwd.contexts[t];
        for (j, raw) in fwd.raw_log_var[t].iter().enumerate() {
            if !(LOG_VAR_MIN..=LOG_VAR_MAX).contains(raw) {
                dlv[t][j] = 0.0;
            }
        }
        g.head_mu_w.add_outer(1.0, &dmu[t], c);
        axpy(1.0, &dmu[t], &mut g.head_mu_b);
        p.head_mu_w.matvec_t_add_into(&dmu[t], &mut dctx[t]);
        g.head_logvar_w.add_outer(1.0, &dlv[t], c);
        axpy(1.0, &dlv[t], &mut g.head_logvar_b);
        p.head_logvar_w.matvec_t_add_into(&dlv[t], &mut dctx[t]);
    }

    // Backpropagation through time: c_t = tanh(W_in e_t + W_rec c_{t-1} + b).
    for t in (0..steps).rev() {
        let c = &fwd.contexts[t];
        let da: Vec<f64> = dctx[t]
            .iter()
            .zip(c)
            .map(|(dc, c)| dc * (1.0 - c * c))
            .collect();
        let item = prefix[t];
        g.rnn_w_in.add_outer(1.0, &da, p.item_embeddings.row(item));
        let mut de = vec![0.0; d];
        p.rnn_w_in.matvec_t_add_into(&da, &mut de);
        axpy(1.0, &de, g.item_embeddings.row_mut(item));
        axpy(1.0, &da, &mut g.rnn_b);
        if t > 0 {
            let prev = &fwd.contexts[t - 1];
            g.rnn_w_rec.add_outer(1.0, &da, prev);
            p.rnn_w_rec.matvec_t_add_into(&da, &mut dctx[t - 1]);
        }
    }

    Ok((loss, g))
}
