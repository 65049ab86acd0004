//! Central finite-difference verification of [`backward`].

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::model::{Model, ModelConfig, LOG_VAR_MAX, LOG_VAR_MIN};
use crate::rng::{stream, tags};

use super::backward::{backward, Gradients};
use super::ddouble::DD;
use super::loss::{split_target, total_loss, LossWeights};

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckConfig {
    pub dim: usize,
    pub n_intents: usize,
    pub n_items: usize,
    /// Number of history steps the evidence bound runs over; the sequence
    /// has one extra item as the next-item target.
    pub steps: usize,
    pub seed: u64,
    pub step_size: f64,
    pub tolerance: f64,
    /// Start from an all-zero model instead of the seeded initialization.
    pub zero_init: bool,
    pub weights: LossWeights,
}

impl Default for GradCheckConfig {
    fn default() -> Self {
        Self {
            dim: 8,
            n_intents: 3,
            n_items: 20,
            steps: 5,
            seed: 0,
            step_size: 1e-4,
            tolerance: 1e-4,
            zero_init: false,
            weights: LossWeights::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupCheck {
    pub name: &'static str,
    pub n_params: usize,
    pub max_rel_error: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub tolerance: f64,
    pub groups: Vec<GroupCheck>,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.groups.iter().all(|g| g.passed)
    }

    pub fn max_rel_error(&self) -> f64 {
        self.groups
            .iter()
            .map(|g| g.max_rel_error)
            .fold(0.0, f64::max)
    }
}

pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8)
}

/// Fourth-order central differences of the total loss, one parameter at a
/// time. The loss is re-evaluated by an independent double-double
/// implementation so round-off stays far below the differences being taken.
pub fn numeric_gradients(
    model: &Model,
    sequence: &[usize],
    eps: &[Vec<f64>],
    w: LossWeights,
    step: f64,
) -> Result<Gradients> {
    // Runs the shape and index checks.
    total_loss(model, sequence, eps, w)?;
    let (prefix, target) = split_target(sequence)?;
    let mut reference = Reference::new(model, prefix, target, eps, w);
    let h = DD::from_f64(step);
    let mut out = Gradients::zeros_like(model);
    for (gi, (_, grad)) in out.groups_mut().into_iter().enumerate() {
        for (i, slot) in grad.iter_mut().enumerate() {
            let orig = reference.params[gi][i];
            let mut at = |offset: DD| {
                reference.params[gi][i] = orig + offset;
                reference.loss()
            };
            let (p2, p1) = (at(h + h), at(h));
            let (m1, m2) = (at(-h), at(-(h + h)));
            reference.params[gi][i] = orig;
            let eight = DD::from_f64(8.0);
            let num = (p1 - m1) * eight - (p2 - m2);
            *slot = (num / (DD::from_f64(12.0) * h)).to_f64();
        }
    }
    Ok(out)
}

/// Total loss evaluated in double-double arithmetic, parameters stored per
/// group in the same order and row-major layout as [`ModelParams::groups`].
struct Reference<'a> {
    params: Vec<Vec<DD>>,
    dim: usize,
    n_items: usize,
    n_intents: usize,
    prefix: &'a [usize],
    target: usize,
    eps: &'a [Vec<f64>],
    w: LossWeights,
}

impl<'a> Reference<'a> {
    fn new(
        model: &Model,
        prefix: &'a [usize],
        target: usize,
        eps: &'a [Vec<f64>],
        w: LossWeights,
    ) -> Self {
        let params = model
            .params
            .groups()
            .iter()
            .map(|(_, g)| g.iter().map(|&v| DD::from_f64(v)).collect())
            .collect();
        Self {
            params,
            dim: model.config.dim,
            n_items: model.config.n_items,
            n_intents: model.config.n_intents,
            prefix,
            target,
            eps,
            w,
        }
    }

    /// `W x` for a row-major matrix group with `x.len()` columns.
    fn matvec(&self, group: usize, x: &[DD]) -> Vec<DD> {
        self.params[group]
            .chunks(x.len())
            .map(|row| row.iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    fn log_softmax_at(logits: &[DD], at: usize) -> DD {
        let m = logits.iter().copied().fold(logits[0], DD::max);
        let lse = m + logits.iter().map(|&l| (l - m).exp()).sum::<DD>().ln();
        logits[at] - lse
    }

    fn loss(&self) -> DD {
        let d = self.dim;
        let [emb, bank, wq, w_in, w_rec, b, mu_w, mu_b, lv_w, lv_b, logit] =
            std::array::from_fn(|g| g);
        let half = DD::from_f64(0.5);
        let mut context = vec![DD::ZERO; d];
        let mut recon = DD::ZERO;
        let mut kl = DD::ZERO;
        let mut last_mu = Vec::new();
        for (t, &item) in self.prefix.iter().enumerate() {
            let e = &self.params[emb][item * d..(item + 1) * d];
            let a_in = self.matvec(w_in, e);
            let a_rec = self.matvec(w_rec, &context);
            context = (0..d)
                .map(|j| (a_in[j] + a_rec[j] + self.params[b][j]).tanh())
                .collect();
            let mu: Vec<DD> = self
                .matvec(mu_w, &context)
                .into_iter()
                .zip(&self.params[mu_b])
                .map(|(x, &b)| x + b)
                .collect();
            let lv: Vec<DD> = self
                .matvec(lv_w, &context)
                .into_iter()
                .zip(&self.params[lv_b])
                .map(|(x, &b)| (x + b).clamp(LOG_VAR_MIN, LOG_VAR_MAX))
                .collect();
            let sample: Vec<DD> = (0..d)
                .map(|j| mu[j] + (half * lv[j]).exp() * DD::from_f64(self.eps[t][j]))
                .collect();
            let logits = self.matvec(emb, &sample);
            recon = recon - Self::log_softmax_at(&logits, item);
            for j in 0..d {
                kl = kl + half * (lv[j].exp() + mu[j] * mu[j] - DD::ONE - lv[j]);
            }
            last_mu = mu;
        }
        let q = self.matvec(wq, &context);
        let att_logits = self.matvec(bank, &q);
        debug_assert_eq!(att_logits.len(), self.n_intents);
        let m = att_logits.iter().copied().fold(att_logits[0], DD::max);
        let ex: Vec<DD> = att_logits.iter().map(|&l| (l - m).exp()).collect();
        let total: DD = ex.iter().copied().sum();
        let gamma = self.params[logit][0].sigmoid();
        let u: Vec<DD> = (0..d)
            .map(|j| {
                let z: DD = ex
                    .iter()
                    .enumerate()
                    .map(|(k, &a)| a / total * self.params[bank][k * d + j])
                    .sum();
                gamma * z + (DD::ONE - gamma) * last_mu[j]
            })
            .collect();
        let scores = self.matvec(emb, &u);
        debug_assert_eq!(scores.len(), self.n_items);
        let next = -Self::log_softmax_at(&scores, self.target);
        let lambda = DD::from_f64(self.w.lambda_elbo);
        let beta = DD::from_f64(self.w.beta);
        next + lambda * (recon + beta * kl)
    }
}

/// Per-group maximum of [`relative_error`] between two gradients.
pub fn compare_gradients(
    analytic: &Gradients,
    numeric: &Gradients,
    tolerance: f64,
) -> GradCheckReport {
    let groups = analytic
        .groups()
        .iter()
        .zip(numeric.groups().iter())
        .map(|((name, a), (_, n))| {
            let max_rel_error = a
                .iter()
                .zip(n.iter())
                .map(|(&x, &y)| relative_error(x, y))
                .fold(0.0, f64::max);
            GroupCheck {
                name,
                n_params: a.len(),
                max_rel_error,
                passed: max_rel_error <= tolerance,
            }
        })
        .collect();
    GradCheckReport { tolerance, groups }
}

/// Builds a small random instance, then checks [`backward`] against central
/// differences for every parameter group.
pub fn grad_check(cfg: &GradCheckConfig) -> Result<GradCheckReport> {
    let model_cfg = ModelConfig::new(cfg.dim, cfg.n_intents, cfg.n_items, cfg.steps.max(1))?;
    let model = if cfg.zero_init {
        Model::zeros(model_cfg)
    } else {
        Model::new(model_cfg, cfg.seed)
    };
    let mut rng = stream(cfg.seed, &[tags::GRADCHECK]);
    let sequence: Vec<usize> = (0..=cfg.steps)
        .map(|_| rng.random_range(0..cfg.n_items))
        .collect();
    let eps: Vec<Vec<f64>> = (0..cfg.steps)
        .map(|_| (0..cfg.dim).map(|_| rng.sample(StandardNormal)).collect())
        .collect();
    let (_, analytic) = backward(&model, &sequence, &eps, cfg.weights)?;
    let numeric = numeric_gradients(&model, &sequence, &eps, cfg.weights, cfg.step_size)?;
    Ok(compare_gradients(&analytic, &numeric, cfg.tolerance))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_error_floor() {
        assert_eq!(relative_error(0.0, 0.0), 0.0);
        assert_eq!(relative_error(1.0, 1.0), 0.0);
        assert!((relative_error(2.0, 1.0) - 0.5).abs() < 1e-15);
        assert!((relative_error(1e-12, 0.0) - 1e-4).abs() < 1e-15);
    }

    #[test]
    fn reference_loss_matches_total_loss() {
        for seed in 0..4 {
            let model = Model::new(ModelConfig::new(6, 3, 15, 8).unwrap(), seed);
            let seq = [4, 0, 14, 7, 7, 2];
            let eps: Vec<Vec<f64>> = (0..5)
                .map(|t| (0..6).map(|j| ((t * 6 + j) as f64 * 0.37).sin()).collect())
                .collect();
            let w = LossWeights {
                lambda_elbo: 0.3,
                beta: 0.7,
            };
            let expected = total_loss(&model, &seq, &eps, w).unwrap().total;
            let (prefix, target) = split_target(&seq).unwrap();
            let got = Reference::new(&model, prefix, target, &eps, w)
                .loss()
                .to_f64();
            assert!(
                (got - expected).abs() <= 1e-12 * expected.abs(),
                "{got} vs {expected}"
            );
        }
    }

    #[test]
    fn seeded_instance_passes() {
        let report = grad_check(&GradCheckConfig::default()).unwrap();
        assert!(report.passed(), "{report:#?}");
        assert_eq!(report.groups.len(), 11);
    }

    #[test]
    fn zero_model_passes() {
        let cfg = GradCheckConfig {
            zero_init: true,
            seed: 3,
            ..Default::default()
        };
        let report = grad_check(&cfg).unwrap();
        assert!(report.passed(), "{report:#?}");
    }

    #[test]
    fn corrupted_gradient_is_flagged() {
        let model = Model::new(ModelConfig::new(4, 2, 6, 5).unwrap(), 5);
        let seq = [0, 3, 5, 1];
        let eps = vec![vec![0.5, -0.3, 0.1, 0.9]; 3];
        let w = LossWeights::default();
        let (_, mut analytic) = backward(&model, &seq, &eps, w).unwrap();
        let numeric = numeric_gradients(&model, &seq, &eps, w, 1e-4).unwrap();
        assert!(compare_gradients(&analytic, &numeric, 1e-4).passed());

        analytic.rnn_w_rec.as_mut_slice()[3] += 1e-2;
        let report = compare_gradients(&analytic, &numeric, 1e-4);
        assert!(!report.passed());
        let flagged: Vec<_> = report
            .groups
            .iter()
            .filter(|g| !g.passed)
            .map(|g| g.name)
            .collect();
        assert_eq!(flagged, vec!["rnn_w_rec"]);
    }
}
