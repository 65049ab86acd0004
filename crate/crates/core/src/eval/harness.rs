//! Leave-one-out evaluation and the two robustness protocols: a cold-start
//! sweep over visible history length and a temporal-disturbance sweep.
//!
//! For every test user the scorer sees a visible history, all history items
//! other than the target are removed from the candidate set, and the target
//! is ranked pessimistically among the rest.

use rand::seq::index::sample;
use rand::seq::SliceRandom;

use super::ias::{ias, intent_table};
use super::metrics::{hr_at_k, ndcg_at_k, rank_of_target};
use super::report::{MetricsReport, SweepResult, SweepRow};
use crate::data::Split;
use crate::error::{Error, Result};
use crate::model::{most_recent, Model};
use crate::rng::{derive_seed, stream, tags};

/// Anything that scores the full catalog for a user given a visible history.
pub trait Scorer {
    fn n_items(&self) -> usize;

    fn scores(&self, user: usize, history: &[usize]) -> Result<Vec<f64>>;

    /// Intent label per item and the number of intents. Scorers without
    /// intent structure put every item in a single intent.
    fn intents(&self) -> (Vec<usize>, usize) {
        (vec![0; self.n_items()], 1)
    }
}

/// Deterministic model scoring with `h_t = μ_t`; histories longer than
/// `max_len` keep their most recent items.
pub struct ModelScorer<'a> {
    model: &'a Model,
}

impl<'a> ModelScorer<'a> {
    pub fn new(model: &'a Model) -> Self {
        Self { model }
    }
}

impl Scorer for ModelScorer<'_> {
    fn n_items(&self) -> usize {
        self.model.n_items()
    }

    fn scores(&self, _user: usize, history: &[usize]) -> Result<Vec<f64>> {
        let visible = most_recent(history, self.model.config.max_len);
        let u = self.model.represent(visible)?;
        Ok(self.model.score_all(&u))
    }

    fn intents(&self) -> (Vec<usize>, usize) {
        (intent_table(self.model), self.model.n_intents())
    }
}

/// Scores each item by how often it appears in the training prefixes.
pub struct PopularityScorer {
    counts: Vec<f64>,
}

impl PopularityScorer {
    pub fn from_split(split: &Split) -> Self {
        let mut counts = vec![0.0; split.n_items];
        for &i in split.users.iter().flat_map(|u| &u.train) {
            counts[i] += 1.0;
        }
        Self { counts }
    }
}

impl Scorer for PopularityScorer {
    fn n_items(&self) -> usize {
        self.counts.len()
    }

    fn scores(&self, _user: usize, _history: &[usize]) -> Result<Vec<f64>> {
        Ok(self.counts.clone())
    }
}

/// One ranking query: what the scorer sees and the item it should surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalCase {
    pub user: usize,
    pub history: Vec<usize>,
    pub target: usize,
}

/// Highest-scoring `k` non-excluded items, ties broken by lower index.
pub fn top_k(scores: &[f64], excluded: &[bool], k: usize) -> Vec<usize> {
    let mut candidates: Vec<usize> = (0..scores.len()).filter(|&i| !excluded[i]).collect();
    candidates.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    candidates.truncate(k);
    candidates
}

pub fn evaluate_cases<S: Scorer + ?Sized>(
    scorer: &S,
    cases: &[EvalCase],
    k: usize,
) -> Result<MetricsReport> {
    if cases.is_empty() {
        return Err(Error::NoQualifyingUsers("nothing to evaluate".into()));
    }
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    let n_items = scorer.n_items();
    let (intent_of, n_intents) = scorer.intents();
    let mut ranks = Vec::with_capacity(cases.len());
    let mut lists = Vec::with_capacity(cases.len());
    let mut excluded = vec![false; n_items];
    for case in cases {
        let scores = scorer.scores(case.user, &case.history)?;
        if scores.len() != n_items {
            return Err(Error::DimensionMismatch {
                what: "score vector",
                expected: n_items,
                got: scores.len(),
            });
        }
        for &i in &case.history {
            excluded[i] = i != case.target;
        }
        ranks.push(rank_of_target(&scores, case.target, &excluded)?);
        lists.push(top_k(&scores, &excluded, k));
        for &i in &case.history {
            excluded[i] = false;
        }
    }
    Ok(MetricsReport {
        hr_at_k: hr_at_k(&ranks, k),
        ndcg_at_k: ndcg_at_k(&ranks, k),
        ias: ias(&lists, &intent_of, n_intents)?,
        k,
        n_users: cases.len(),
    })
}

fn test_cases(split: &Split) -> Vec<EvalCase> {
    split
        .users
        .iter()
        .map(|u| EvalCase {
            user: u.user,
            history: u.train.clone(),
            target: u.test,
        })
        .collect()
}

/// Test-target metrics with each user's training prefix as visible history.
pub fn evaluate_scorer<S: Scorer + ?Sized>(
    scorer: &S,
    split: &Split,
    k: usize,
) -> Result<MetricsReport> {
    evaluate_cases(scorer, &test_cases(split), k)
}

pub fn evaluate(model: &Model, split: &Split, k: usize) -> Result<MetricsReport> {
    evaluate_scorer(&ModelScorer::new(model), split, k)
}

/// Evaluates users with at least `min_train` training items, showing the
/// scorer only the most recent `L` of them for each `L` in `lengths`.
pub fn prefix_sweep<S: Scorer + ?Sized>(
    scorer: &S,
    split: &Split,
    lengths: &[usize],
    min_train: usize,
    k: usize,
) -> Result<SweepResult> {
    let qualifying: Vec<_> = split
        .users
        .iter()
        .filter(|u| u.train.len() >= min_train)
        .collect();
    if qualifying.is_empty() {
        return Err(Error::NoQualifyingUsers(format!(
            "no user has {min_train} or more training items"
        )));
    }
    let mut rows = Vec::with_capacity(lengths.len());
    for &len in lengths {
        let cases: Vec<EvalCase> = qualifying
            .iter()
            .map(|u| EvalCase {
                user: u.user,
                history: most_recent(&u.train, len).to_vec(),
                target: u.test,
            })
            .collect();
        rows.push(SweepRow {
            condition: len as f64,
            report: evaluate_cases(scorer, &cases, k)?,
        });
    }
    SweepResult::new(k, rows)
}

/// Longest visible history in the cold-start sweep.
pub const COLDSTART_MAX_PREFIX: usize = 10;

/// Visible history of 1 through 10 items, restricted to users with at least
/// 11 training items so every prefix is a strict suffix of real history.
pub fn coldstart_sweep<S: Scorer + ?Sized>(
    scorer: &S,
    split: &Split,
    k: usize,
) -> Result<SweepResult> {
    let lengths: Vec<usize> = (1..=COLDSTART_MAX_PREFIX).collect();
    prefix_sweep(scorer, split, &lengths, COLDSTART_MAX_PREFIX + 1, k)
}

/// Picks `⌈level · T⌉` positions with a seeded draw and shuffles the items
/// among them. The item multiset never changes.
pub fn perturb_sequence(sequence: &[usize], level: f64, seed: u64) -> Result<Vec<usize>> {
    if !(0.0..=1.0).contains(&level) {
        return Err(Error::InvalidConfig(format!(
            "disturbance level {level} outside [0, 1]"
        )));
    }
    let n = sequence.len();
    // The small slack keeps products like 0.2 · 5 from rounding up a position.
    let count = ((level * n as f64) - 1e-9).ceil().clamp(0.0, n as f64) as usize;
    let mut out = sequence.to_vec();
    if count < 2 {
        return Ok(out);
    }
    let mut rng = stream(seed, &[tags::PERTURB]);
    let mut positions = sample(&mut rng, n, count).into_vec();
    positions.sort_unstable();
    let mut items: Vec<usize> = positions.iter().map(|&p| sequence[p]).collect();
    items.shuffle(&mut rng);
    for (&p, item) in positions.iter().zip(items) {
        out[p] = item;
    }
    Ok(out)
}

pub const DEFAULT_LEVELS: [f64; 4] = [0.0, 0.2, 0.5, 1.0];

/// Evaluates with every test user's visible history disturbed at each level.
/// The per-user seed mixes `seed`, the level index and the user.
pub fn perturbation_sweep<S: Scorer + ?Sized>(
    scorer: &S,
    split: &Split,
    levels: &[f64],
    k: usize,
    seed: u64,
) -> Result<SweepResult> {
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(
            "disturbance levels must be strictly increasing".into(),
        ));
    }
    let mut rows = Vec::with_capacity(levels.len());
    for (li, &level) in levels.iter().enumerate() {
        let cases = split
            .users
            .iter()
            .map(|u| {
                let s = derive_seed(seed, &[li as u64, u.user as u64]);
                Ok(EvalCase {
                    user: u.user,
                    history: perturb_sequence(&u.train, level, s)?,
                    target: u.test,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(SweepRow {
            condition: level,
            report: evaluate_cases(scorer, &cases, k)?,
        });
    }
    SweepResult::new(k, rows)
}
