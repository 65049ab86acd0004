//! Ranking metrics, intent awareness and robustness sweeps.

mod harness;
mod ias;
mod metrics;
mod report;

pub use harness::{
    coldstart_sweep, evaluate, evaluate_cases, evaluate_scorer, perturb_sequence,
    perturbation_sweep, prefix_sweep, top_k, EvalCase, ModelScorer, PopularityScorer, Scorer,
    COLDSTART_MAX_PREFIX, DEFAULT_LEVELS,
};
pub use ias::{assign_intent, ias, intent_table, list_intent_entropy};
pub use metrics::{hr_at_k, ndcg_at_k, ndcg_gain, rank_of_target, spearman};
pub use report::{MetricsReport, SweepResult, SweepRow};
