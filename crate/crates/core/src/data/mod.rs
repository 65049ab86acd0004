//! Ingestion, preprocessing, splitting and synthetic data.

mod dataset;
mod parse;
mod split;
mod synth;

pub use dataset::{build_sequences, filter_k_core, satisfies_k_core, Dataset, IdMap, TopicLabels};
pub use parse::{parse_interactions, Interaction, ParseReport};
pub use split::{batches, leave_one_out_split, Split, UserSplit};
pub use synth::{synth_generate, SynthConfig, STAY_PROB};
