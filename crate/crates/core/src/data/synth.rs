//! Planted-intent interaction generator.
//!
//! Items are split into equal contiguous topic blocks. Each user owns one to
//! three topics and walks a sticky Markov chain over them: stay with
//! probability [`STAY_PROB`], otherwise jump to one of the user's other
//! topics. Every step emits an item drawn uniformly from the current block.

use rand::seq::index::sample;
use rand::Rng;

use super::dataset::{Dataset, IdMap, TopicLabels};
use crate::error::{Error, Result};
use crate::rng::{stream, tags};

pub const STAY_PROB: f64 = 0.8;
pub const MIN_LEN: usize = 20;
pub const MAX_LEN: usize = 50;
pub const MAX_TOPICS_PER_USER: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthConfig {
    pub n_users: usize,
    pub n_items: usize,
    pub n_topics: usize,
    pub seed: u64,
}

pub fn synth_generate(cfg: &SynthConfig) -> Result<Dataset> {
    if cfg.n_users == 0 || cfg.n_topics == 0 || cfg.n_items == 0 {
        return Err(Error::InvalidConfig(
            "synthetic users, items and topics must all be at least 1".into(),
        ));
    }
    if !cfg.n_items.is_multiple_of(cfg.n_topics) {
        return Err(Error::InvalidConfig(format!(
            "{} topics do not divide {} items",
            cfg.n_topics, cfg.n_items
        )));
    }
    let block = cfg.n_items / cfg.n_topics;
    let mut rng = stream(cfg.seed, &[tags::SYNTH]);

    let mut sequences = Vec::with_capacity(cfg.n_users);
    let mut user_topics = Vec::with_capacity(cfg.n_users);
    for _ in 0..cfg.n_users {
        let n_active = rng.random_range(1..=MAX_TOPICS_PER_USER.min(cfg.n_topics));
        let mut active = sample(&mut rng, cfg.n_topics, n_active).into_vec();
        active.sort_unstable();
        let len = rng.random_range(MIN_LEN..=MAX_LEN);

        let mut slot = rng.random_range(0..n_active);
        let mut seq = Vec::with_capacity(len);
        for t in 0..len {
            if t > 0 && n_active > 1 && !rng.random_bool(STAY_PROB) {
                // Jump to a different active topic, uniformly.
                let offset = rng.random_range(1..n_active);
                slot = (slot + offset) % n_active;
            }
            let topic = active[slot];
            seq.push(topic * block + rng.random_range(0..block));
        }
        sequences.push(seq);
        user_topics.push(active);
    }

    let users = IdMap::from(
        (0..cfg.n_users)
            .map(|u| format!("u{u}"))
            .collect::<Vec<_>>(),
    );
    let items = IdMap::from(
        (0..cfg.n_items)
            .map(|i| format!("i{i}"))
            .collect::<Vec<_>>(),
    );
    Ok(Dataset {
        users,
        items,
        timestamps: sequences
            .iter()
            .map(|s: &Vec<usize>| (0..s.len() as i64).collect())
            .collect(),
        sequences,
        topics: Some(TopicLabels {
            item_topic: (0..cfg.n_items).map(|i| i / block).collect(),
            user_topics,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n_users: usize, n_items: usize, n_topics: usize, seed: u64) -> SynthConfig {
        SynthConfig {
            n_users,
            n_items,
            n_topics,
            seed,
        }
    }

    #[test]
    fn rejects_bad_divisibility() {
        assert!(synth_generate(&cfg(5, 10, 3, 0)).is_err());
        assert!(synth_generate(&cfg(5, 10, 0, 0)).is_err());
    }

    #[test]
    fn reproducible_and_well_formed() {
        let a = synth_generate(&cfg(30, 40, 4, 9)).unwrap();
        assert_eq!(a, synth_generate(&cfg(30, 40, 4, 9)).unwrap());
        assert_ne!(a, synth_generate(&cfg(30, 40, 4, 10)).unwrap());
        a.validate().unwrap();
        let topics = a.topics.as_ref().unwrap();
        for (seq, active) in a.sequences.iter().zip(&topics.user_topics) {
            assert!((MIN_LEN..=MAX_LEN).contains(&seq.len()));
            assert!((1..=3).contains(&active.len()));
            assert!(seq.iter().all(|i| active.contains(&topics.item_topic[*i])));
        }
    }

    #[test]
    fn single_topic_uses_one_block() {
        let d = synth_generate(&cfg(10, 20, 1, 2)).unwrap();
        assert!(d.topics.unwrap().item_topic.iter().all(|&t| t == 0));
        assert!(d.sequences.iter().flatten().all(|&i| i < 20));
    }
}
