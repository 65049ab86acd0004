use rand::seq::SliceRandom;

use super::dataset::Dataset;
use crate::rng::{stream, tags};

/// Leave-one-out partition of one user's sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserSplit {
    pub user: usize,
    pub train: Vec<usize>,
    pub val: usize,
    pub test: usize,
}

impl UserSplit {
    /// `train ++ [val, test]`.
    pub fn full_sequence(&self) -> Vec<usize> {
        let mut s = self.train.clone();
        s.push(self.val);
        s.push(self.test);
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub users: Vec<UserSplit>,
    pub n_items: usize,
    /// Users left out for having fewer than three interactions.
    pub excluded: usize,
}

impl Split {
    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }
}

/// Last item is the test target, second to last the validation target.
pub fn leave_one_out_split(dataset: &Dataset) -> Split {
    let mut users = Vec::new();
    let mut excluded = 0;
    for (user, seq) in dataset.sequences.iter().enumerate() {
        if seq.len() < 3 {
            excluded += 1;
            continue;
        }
        let n = seq.len();
        users.push(UserSplit {
            user,
            train: seq[..n - 2].to_vec(),
            val: seq[n - 2],
            test: seq[n - 1],
        });
    }
    Split {
        users,
        n_items: dataset.n_items(),
        excluded,
    }
}

/// Seeded shuffle of `0..split.len()` for one epoch, chunked into batches.
/// Each `(seed, epoch)` pair gives its own reproducible order.
pub fn batches(split: &Split, batch_size: usize, seed: u64, epoch: u64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..split.len()).collect();
    order.shuffle(&mut stream(seed, &[tags::SHUFFLE, epoch]));
    order
        .chunks(batch_size.max(1))
        .map(<[usize]>::to_vec)
        .collect()
}
