//! Forward mathematics of the unified user representation.
//!
//! A user's history is embedded item by item, run through a single tanh
//! recurrent cell, and turned into a per-step diagonal Gaussian over the
//! hidden behavior state. The final context also generates a query that
//! attends over a bank of `K` latent intent vectors. The pooled intent and
//! the last Gaussian mean are blended by a learnable convex weight, and the
//! result scores items by inner product with their embeddings.

use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, sigmoid, softmax, Matrix};

/// Lower clamp for the Gaussian log-variance.
pub const LOG_VAR_MIN: f64 = -10.0;
/// Upper clamp for the Gaussian log-variance.
pub const LOG_VAR_MAX: f64 = 10.0;

/// Half-width of the uniform initialization range.
pub const INIT_SCALE: f64 = 0.1;

/// Shape of a model: embedding width, number of intents, catalog size and
/// the longest history the encoder accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub dim: usize,
    pub n_intents: usize,
    pub n_items: usize,
    pub max_len: usize,
}

impl ModelConfig {
    pub fn new(dim: usize, n_intents: usize, n_items: usize, max_len: usize) -> Result<Self> {
        let cfg = Self {
            dim,
            n_intents,
            n_items,
            max_len,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("dim", self.dim),
            ("n_intents", self.n_intents),
            ("n_items", self.n_items),
            ("max_len", self.max_len),
        ] {
            if v == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }
}

/// Every learnable tensor of the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// `|I| × d`, one row per item.
    pub item_embeddings: Matrix,
    /// `K × d`, one row per latent intent.
    pub intent_bank: Matrix,
    pub query_proj: Matrix,
    pub rnn_w_in: Matrix,
    pub rnn_w_rec: Matrix,
    pub rnn_b: Vec<f64>,
    pub head_mu_w: Matrix,
    pub head_mu_b: Vec<f64>,
    pub head_logvar_w: Matrix,
    pub head_logvar_b: Vec<f64>,
    /// Fusion weight in logit space; `γ = sigmoid(fusion_logit)`.
    pub fusion_logit: f64,
}

/// Names of the parameter groups, in the order [`ModelParams::groups`] yields them.
pub const PARAM_GROUPS: [&str; 11] = [
    "item_embeddings",
    "intent_bank",
    "query_proj",
    "rnn_w_in",
    "rnn_w_rec",
    "rnn_b",
    "head_mu_w",
    "head_mu_b",
    "head_logvar_w",
    "head_logvar_b",
    "fusion_logit",
];

impl ModelParams {
    pub fn zeros(cfg: &ModelConfig) -> Self {
        let d = cfg.dim;
        Self {
            item_embeddings: Matrix::zeros(cfg.n_items, d),
            intent_bank: Matrix::zeros(cfg.n_intents, d),
            query_proj: Matrix::zeros(d, d),
            rnn_w_in: Matrix::zeros(d, d),
            rnn_w_rec: Matrix::zeros(d, d),
            rnn_b: vec![0.0; d],
            head_mu_w: Matrix::zeros(d, d),
            head_mu_b: vec![0.0; d],
            head_logvar_w: Matrix::zeros(d, d),
            head_logvar_b: vec![0.0; d],
            fusion_logit: 0.0,
        }
    }

    /// Matrices uniform in `[-0.1, 0.1]` from a seeded generator; biases and
    /// the fusion logit start at zero.
    pub fn init(cfg: &ModelConfig, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dist = Uniform::new_inclusive(-INIT_SCALE, INIT_SCALE).expect("valid range");
        let mut p = Self::zeros(cfg);
        for m in [
            &mut p.item_embeddings,
            &mut p.intent_bank,
            &mut p.query_proj,
            &mut p.rnn_w_in,
            &mut p.rnn_w_rec,
            &mut p.head_mu_w,
            &mut p.head_logvar_w,
        ] {
            for v in m.as_mut_slice() {
                *v = dist.sample(&mut rng);
            }
        }
        p
    }

    pub fn groups(&self) -> [(&'static str, &[f64]); 11] {
        [
            (PARAM_GROUPS[0], self.item_embeddings.as_slice()),
            (PARAM_GROUPS[1], self.intent_bank.as_slice()),
            (PARAM_GROUPS[2], self.query_proj.as_slice()),
            (PARAM_GROUPS[3], self.rnn_w_in.as_slice()),
            (PARAM_GROUPS[4], self.rnn_w_rec.as_slice()),
            (PARAM_GROUPS[5], &self.rnn_b),
            (PARAM_GROUPS[6], self.head_mu_w.as_slice()),
            (PARAM_GROUPS[7], &self.head_mu_b),
            (PARAM_GROUPS[8], self.head_logvar_w.as_slice()),
            (PARAM_GROUPS[9], &self.head_logvar_b),
            (PARAM_GROUPS[10], std::slice::from_ref(&self.fusion_logit)),
        ]
    }

    pub fn groups_mut(&mut self) -> [(&'static str, &mut [f64]); 11] {
        [
            (PARAM_GROUPS[0], self.item_embeddings.as_mut_slice()),
            (PARAM_GROUPS[1], self.intent_bank.as_mut_slice()),
            (PARAM_GROUPS[2], self.query_proj.as_mut_slice()),
            (PARAM_GROUPS[3], self.rnn_w_in.as_mut_slice()),
            (PARAM_GROUPS[4], self.rnn_w_rec.as_mut_slice()),
            (PARAM_GROUPS[5], &mut self.rnn_b),
            (PARAM_GROUPS[6], self.head_mu_w.as_mut_slice()),
            (PARAM_GROUPS[7], &mut self.head_mu_b),
            (PARAM_GROUPS[8], self.head_logvar_w.as_mut_slice()),
            (PARAM_GROUPS[9], &mut self.head_logvar_b),
            (
                PARAM_GROUPS[10],
                std::slice::from_mut(&mut self.fusion_logit),
            ),
        ]
    }

    pub fn num_params(&self) -> usize {
        self.groups().iter().map(|(_, g)| g.len()).sum()
    }

    pub fn all_finite(&self) -> bool {
        self.groups()
            .iter()
            .all(|(_, g)| g.iter().all(|v| v.is_finite()))
    }

    /// True when both parameter sets have identical group lengths.
    pub fn same_shape(&self, other: &Self) -> bool {
        self.groups()
            .iter()
            .zip(other.groups().iter())
            .all(|((_, a), (_, b))| a.len() == b.len())
            && self.item_embeddings.cols() == other.item_embeddings.cols()
    }

    /// Current fusion weight `γ ∈ (0, 1)`.
    pub fn gamma(&self) -> f64 {
        sigmoid(self.fusion_logit)
    }
}

/// Posterior over the hidden behavior state at one step.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    pub mu: Vec<f64>,
    /// Diagonal log-variance, clamped to `[LOG_VAR_MIN, LOG_VAR_MAX]`.
    pub log_var: Vec<f64>,
}

impl GaussianState {
    pub fn standard(dim: usize) -> Self {
        Self {
            mu: vec![0.0; dim],
            log_var: vec![0.0; dim],
        }
    }

    pub fn variance(&self) -> Vec<f64> {
        self.log_var.iter().map(|lv| lv.exp()).collect()
    }

    /// `mu + exp(log_var / 2) ⊙ eps`. The noise is always supplied by the caller.
    pub fn reparameterize(&self, eps: &[f64]) -> Result<Vec<f64>> {
        if eps.len() != self.mu.len() {
            return Err(Error::DimensionMismatch {
                what: "reparameterize noise",
                expected: self.mu.len(),
                got: eps.len(),
            });
        }
        Ok(self
            .mu
            .iter()
            .zip(&self.log_var)
            .zip(eps)
            .map(|((m, lv), e)| m + (0.5 * lv).exp() * e)
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntentAttention {
    /// Softmax weights over the intent bank.
    pub weights: Vec<f64>,
    /// Attention-weighted sum of intent vectors (`z_u`).
    pub pooled: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UserRepresentation {
    pub u: Vec<f64>,
}

/// Everything computed by [`Model::forward`]; the trainer differentiates through it.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardPass {
    pub contexts: Vec<Vec<f64>>,
    pub states: Vec<GaussianState>,
    /// Log-variance before clamping, kept to mask the clamp's gradient.
    pub raw_log_var: Vec<Vec<f64>>,
    pub samples: Vec<Vec<f64>>,
    pub query: Vec<f64>,
    pub attention: IntentAttention,
    pub gamma: f64,
    pub user: UserRepresentation,
}

impl ForwardPass {
    pub fn last_state(&self) -> &GaussianState {
        self.states.last().expect("forward pass is never empty")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub config: ModelConfig,
    pub params: ModelParams,
}

impl Model {
    pub fn new(config: ModelConfig, seed: u64) -> Self {
        let params = ModelParams::init(&config, seed);
        Self { config, params }
    }

    pub fn zeros(config: ModelConfig) -> Self {
        let params = ModelParams::zeros(&config);
        Self { config, params }
    }

    pub fn from_parts(config: ModelConfig, params: ModelParams) -> Result<Self> {
        config.validate()?;
        let expected = ModelParams::zeros(&config);
        for ((name, want), (_, got)) in expected.groups().iter().zip(params.groups().iter()) {
            if want.len() != got.len() {
                return Err(Error::DimensionMismatch {
                    what: name,
                    expected: want.len(),
                    got: got.len(),
                });
            }
        }
        Ok(Self { config, params })
    }

    pub fn dim(&self) -> usize {
        self.config.dim
    }

    pub fn n_items(&self) -> usize {
        self.config.n_items
    }

    pub fn n_intents(&self) -> usize {
        self.config.n_intents
    }

    fn check_item(&self, item: usize) -> Result<()> {
        if item >= self.config.n_items {
            return Err(Error::IndexOutOfRange {
                what: "item catalog",
                index: item,
                len: self.config.n_items,
            });
        }
        Ok(())
    }

    pub fn embed_item(&self, item: usize) -> Result<&[f64]> {
        self.check_item(item)?;
        Ok(self.params.item_embeddings.row(item))
    }

    fn check_sequence(&self, sequence: &[usize]) -> Result<()> {
        if sequence.is_empty() {
            return Err(Error::EmptySequence);
        }
        if sequence.len() > self.config.max_len {
            return Err(Error::SequenceTooLong {
                len: sequence.len(),
                max_len: self.config.max_len,
            });
        }
        sequence.iter().try_for_each(|&i| self.check_item(i))
    }

    /// Causal recurrent contexts `c_t = tanh(W_in e_t + W_rec c_{t-1} + b)`, `c_0 = 0`.
    pub fn encode_context(&self, sequence: &[usize]) -> Result<Vec<Vec<f64>>> {
        self.check_sequence(sequence)?;
        let p = &self.params;
        let mut contexts: Vec<Vec<f64>> = Vec::with_capacity(sequence.len());
        for &item in sequence {
            let mut a = p.rnn_b.clone();
            p.rnn_w_in
                .matvec_add_into(p.item_embeddings.row(item), &mut a);
            if let Some(prev) = contexts.last() {
                p.rnn_w_rec.matvec_add_into(prev, &mut a);
            }
            a.iter_mut().for_each(|v| *v = v.tanh());
            contexts.push(a);
        }
        Ok(contexts)
    }

    /// Returns the clamped state and the raw (pre-clamp) log-variance.
    fn heads_raw(&self, context: &[f64]) -> Result<(GaussianState, Vec<f64>)> {
        if context.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                what: "context vector",
                expected: self.dim(),
                got: context.len(),
            });
        }
        if !context.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("context vector"));
        }
        let p = &self.params;
        let mut mu = p.head_mu_b.clone();
        p.head_mu_w.matvec_add_into(context, &mut mu);
        let mut raw = p.head_logvar_b.clone();
        p.head_logvar_w.matvec_add_into(context, &mut raw);
        let log_var = raw
            .iter()
            .map(|v| v.clamp(LOG_VAR_MIN, LOG_VAR_MAX))
            .collect();
        Ok((GaussianState { mu, log_var }, raw))
    }

    pub fn gaussian_heads(&self, context: &[f64]) -> Result<GaussianState> {
        self.heads_raw(context).map(|(state, _)| state)
    }

    pub fn make_query(&self, last_context: &[f64]) -> Vec<f64> {
        self.params.query_proj.matvec(last_context)
    }

    pub fn intent_attention(&self, query: &[f64]) -> IntentAttention {
        let bank = &self.params.intent_bank;
        let logits: Vec<f64> = (0..bank.rows()).map(|k| dot(query, bank.row(k))).collect();
        let weights = softmax(&logits);
        let mut pooled = vec![0.0; bank.cols()];
        for (k, &w) in weights.iter().enumerate() {
            axpy(w, bank.row(k), &mut pooled);
        }
        IntentAttention { weights, pooled }
    }

    /// `u = γ z_u + (1 - γ) μ_T`.
    pub fn fuse(&self, pooled: &[f64], last_mu: &[f64]) -> UserRepresentation {
        let gamma = self.params.gamma();
        let u = pooled
            .iter()
            .zip(last_mu)
            .map(|(z, m)| gamma * z + (1.0 - gamma) * m)
            .collect();
        UserRepresentation { u }
    }

    pub fn score(&self, user: &UserRepresentation, item: usize) -> Result<f64> {
        Ok(dot(&user.u, self.embed_item(item)?))
    }

    pub fn score_all(&self, user: &UserRepresentation) -> Vec<f64> {
        self.params.item_embeddings.matvec(&user.u)
    }

    /// Full forward pass with caller-supplied noise, one vector per step.
    pub fn forward(&self, sequence: &[usize], eps: &[Vec<f64>]) -> Result<ForwardPass> {
        if eps.len() != sequence.len() {
            return Err(Error::DimensionMismatch {
                what: "noise sequence length",
                expected: sequence.len(),
                got: eps.len(),
            });
        }
        let contexts = self.encode_context(sequence)?;
        let mut states = Vec::with_capacity(contexts.len());
        let mut raw_log_var = Vec::with_capacity(contexts.len());
        let mut samples = Vec::with_capacity(contexts.len());
        for (c, e) in contexts.iter().zip(eps) {
            let (state, raw) = self.heads_raw(c)?;
            samples.push(state.reparameterize(e)?);
            states.push(state);
            raw_log_var.push(raw);
        }
        let query = self.make_query(contexts.last().expect("non-empty"));
        let attention = self.intent_attention(&query);
        let user = self.fuse(&attention.pooled, &states.last().expect("non-empty").mu);
        Ok(ForwardPass {
            contexts,
            states,
            raw_log_var,
            samples,
            query,
            attention,
            gamma: self.params.gamma(),
            user,
        })
    }

    /// Deterministic user representation (`h_t = μ_t`), skipping the sampling path.
    pub fn represent(&self, sequence: &[usize]) -> Result<UserRepresentation> {
        let contexts = self.encode_context(sequence)?;
        let last = contexts.last().expect("non-empty");
        let state = self.gaussian_heads(last)?;
        let attention = self.intent_attention(&self.make_query(last));
        Ok(self.fuse(&attention.pooled, &state.mu))
    }
}

/// The most recent `max` items of a history.
pub fn most_recent(history: &[usize], max: usize) -> &[usize] {
    &history[history.len().saturating_sub(max)..]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(d: usize, k: usize, n: usize) -> ModelConfig {
        ModelConfig::new(d, k, n, 50).unwrap()
    }

    #[test]
    fn embed_item_reads_rows_and_checks_bounds() {
        let mut m = Model::zeros(cfg(3, 2, 4));
        assert_eq!(m.embed_item(0).unwrap(), &[0.0, 0.0, 0.0]);
        m.params
            .item_embeddings
            .row_mut(2)
            .copy_from_slice(&[0.0, 1.0, 0.0]);
        assert_eq!(m.embed_item(2).unwrap(), &[0.0, 1.0, 0.0]);
        assert!(matches!(
            m.embed_item(4),
            Err(Error::IndexOutOfRange { index: 4, .. })
        ));
    }

    #[test]
    fn zero_encoder_gives_zero_contexts() {
        let mut m = Model::new(cfg(4, 2, 6), 3);
        m.params.rnn_w_in = Matrix::zeros(4, 4);
        m.params.rnn_w_rec = Matrix::zeros(4, 4);
        let cs = m.encode_context(&[0, 3, 5, 1]).unwrap();
        assert_eq!(cs.len(), 4);
        assert!(cs.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn single_step_context_is_base_case() {
        let m = Model::new(cfg(4, 2, 6), 11);
        let cs = m.encode_context(&[2]).unwrap();
        let p = &m.params;
        let mut expect = p.rnn_w_in.matvec(p.item_embeddings.row(2));
        for (e, b) in expect.iter_mut().zip(&p.rnn_b) {
            *e = (*e + b).tanh();
        }
        assert_eq!(cs[0], expect);
    }

    #[test]
    fn encode_rejects_empty_and_overlong() {
        let m = Model::new(ModelConfig::new(2, 1, 3, 2).unwrap(), 0);
        assert!(matches!(m.encode_context(&[]), Err(Error::EmptySequence)));
        assert!(matches!(
            m.encode_context(&[0, 1, 2]),
            Err(Error::SequenceTooLong { .. })
        ));
    }

    #[test]
    fn heads_clamp_and_identity() {
        let mut m = Model::zeros(cfg(2, 1, 2));
        let s = m.gaussian_heads(&[0.0, 0.0]).unwrap();
        assert_eq!(s, GaussianState::standard(2));

        m.params.head_mu_w = Matrix::identity(2);
        m.params.head_logvar_b = vec![50.0, -50.0];
        let s = m.gaussian_heads(&[0.3, -0.7]).unwrap();
        assert_eq!(s.mu, vec![0.3, -0.7]);
        assert_eq!(s.log_var, vec![LOG_VAR_MAX, LOG_VAR_MIN]);
        assert!(m.gaussian_heads(&[f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn reparameterize_cases() {
        let s = GaussianState {
            mu: vec![0.5, -1.0],
            log_var: vec![0.0, 0.0],
        };
        assert_eq!(s.reparameterize(&[0.0, 0.0]).unwrap(), s.mu);
        assert_eq!(s.reparameterize(&[1.0, 1.0]).unwrap(), vec![1.5, 0.0]);
        assert!(s.reparameterize(&[1.0]).is_err());
    }

    #[test]
    fn attention_examples() {
        let mut m = Model::zeros(cfg(2, 4, 2));
        let a = m.intent_attention(&[1.0, -1.0]);
        assert_eq!(a.weights, vec![0.25; 4]);

        // Logits [ln 2, 0] -> [2/3, 1/3].
        let mut m2 = Model::zeros(cfg(1, 2, 2));
        m2.params.intent_bank = Matrix::from_fn(2, 1, |r, _| if r == 0 { 2f64.ln() } else { 0.0 });
        let a = m2.intent_attention(&[1.0]);
        assert!((a.weights[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((a.weights[1] - 1.0 / 3.0).abs() < 1e-15);

        // A logit gap of 50 saturates onto the leading intent.
        m.params.intent_bank = Matrix::from_fn(4, 2, |r, c| {
            [[50.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]][r][c]
        });
        let a = m.intent_attention(&[1.0, 0.0]);
        assert!((a.pooled[0] - 50.0).abs() < 1e-9 * 50.0);
        assert!(a.pooled[1].abs() < 1e-9);
    }

    #[test]
    fn query_examples() {
        let mut m = Model::zeros(cfg(3, 2, 2));
        assert_eq!(m.make_query(&[1.0, 2.0, 3.0]), vec![0.0; 3]);
        m.params.query_proj = Matrix::identity(3);
        assert_eq!(m.make_query(&[1.0, 2.0, 3.0]), vec![1.0, 2.0, 3.0]);
        let m = Model::new(cfg(3, 2, 2), 5);
        let c = [0.2, -0.1, 0.4];
        let q = m.make_query(&c);
        let q3 = m.make_query(&c.map(|v| 3.0 * v));
        for (a, b) in q.iter().zip(&q3) {
            assert!((3.0 * a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn fuse_examples() {
        let mut m = Model::zeros(cfg(2, 1, 2));
        let z = [1.0, 0.0];
        let mu = [0.0, 1.0];
        assert_eq!(m.fuse(&z, &mu).u, vec![0.5, 0.5]);
        m.params.fusion_logit = 50.0;
        let u = m.fuse(&z, &mu).u;
        assert!((u[0] - 1.0).abs() < 1e-9 && u[1].abs() < 1e-9);
        m.params.fusion_logit = -50.0;
        let u = m.fuse(&z, &mu).u;
        assert!(u[0].abs() < 1e-9 && (u[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn score_examples() {
        let mut m = Model::zeros(cfg(2, 1, 3));
        m.params.item_embeddings =
            Matrix::from_fn(3, 2, |r, c| [[1.0, 0.0], [0.0, 1.0], [3.0, -1.0]][r][c]);
        let axis = UserRepresentation { u: vec![1.0, 0.0] };
        assert_eq!(m.score(&axis, 0).unwrap(), 1.0);
        assert_eq!(m.score(&axis, 1).unwrap(), 0.0);
        let u = UserRepresentation { u: vec![1.0, 2.0] };
        assert_eq!(m.score(&u, 2).unwrap(), 1.0);
        assert!(m.score(&u, 3).is_err());
        let zero = UserRepresentation { u: vec![0.0, 0.0] };
        assert_eq!(m.score_all(&zero), vec![0.0; 3]);
    }

    #[test]
    fn score_all_matches_pointwise_and_argmax() {
        let m = Model::new(cfg(5, 2, 10), 9);
        let u = m.represent(&[1, 4, 7]).unwrap();
        let all = m.score_all(&u);
        let mut best = (0, f64::NEG_INFINITY);
        for (i, &s) in all.iter().enumerate() {
            let single = m.score(&u, i).unwrap();
            assert_eq!(s, single);
            if single > best.1 {
                best = (i, single);
            }
        }
        let argmax = all
            .iter()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, &s)| if s > acc.1 { (i, s) } else { acc },
            );
        assert_eq!(argmax.0, best.0);
    }

    #[test]
    fn forward_shapes_and_determinism() {
        let m = Model::new(cfg(4, 3, 8), 2);
        let seq = [3usize];
        let eps = vec![vec![0.0; 4]];
        let f = m.forward(&seq, &eps).unwrap();
        assert_eq!(f.states.len(), 1);
        assert_eq!(f.samples[0], f.states[0].mu);

        let seq = [3usize, 1, 7, 0];
        let eps: Vec<Vec<f64>> = (0..4).map(|t| vec![0.1 * t as f64; 4]).collect();
        let a = m.forward(&seq, &eps).unwrap();
        let b = m.forward(&seq, &eps).unwrap();
        assert_eq!(a, b);
        assert_eq!(m.represent(&seq).unwrap(), a.user);
        assert!(m.forward(&seq, &eps[..3]).is_err());
    }

    #[test]
    fn from_parts_checks_shapes() {
        let c = cfg(3, 2, 4);
        let p = ModelParams::zeros(&cfg(3, 2, 5));
        assert!(Model::from_parts(c, p).is_err());
        assert!(Model::from_parts(c, ModelParams::zeros(&c)).is_ok());
    }

    #[test]
    fn init_is_seeded_and_bounded() {
        let c = cfg(4, 2, 6);
        let a = ModelParams::init(&c, 7);
        assert_eq!(a, ModelParams::init(&c, 7));
        assert_ne!(a, ModelParams::init(&c, 8));
        assert!(a
            .item_embeddings
            .as_slice()
            .iter()
            .all(|v| v.abs() <= INIT_SCALE));
        assert_eq!(a.rnn_b, vec![0.0; 4]);
        assert_eq!(a.gamma(), 0.5);
    }
}
