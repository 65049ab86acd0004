use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::parse::Interaction;
use crate::error::{Error, Result};

/// Bijection between external string ids and dense indices `0..len`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct IdMap {
    ids: Vec<String>,
    index: HashMap<String, usize>,
}

impl IdMap {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Index for `id`, assigning the next free one on first sight.
    pub fn intern(&mut self, id: &str) -> usize {
        if let Some(&i) = self.index.get(id) {
            return i;
        }
        let i = self.ids.len();
        self.ids.push(id.to_string());
        self.index.insert(id.to_string(), i);
        i
    }

    pub fn get(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn id(&self, index: usize) -> Option<&str> {
        self.ids.get(index).map(String::as_str)
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }
}

impl From<Vec<String>> for IdMap {
    fn from(ids: Vec<String>) -> Self {
        let mut map = IdMap::default();
        for id in &ids {
            map.intern(id);
        }
        map
    }
}

impl From<IdMap> for Vec<String> {
    fn from(map: IdMap) -> Self {
        map.ids
    }
}

/// Ground truth kept by the synthetic generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicLabels {
    /// Topic of every item index.
    pub item_topic: Vec<usize>,
    /// Active topics of every user index.
    pub user_topics: Vec<Vec<usize>>,
}

/// Per-user interaction sequences in timestamp order, over dense ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub users: IdMap,
    pub items: IdMap,
    /// `sequences[u]` is user `u`'s item history, oldest first.
    pub sequences: Vec<Vec<usize>>,
    pub timestamps: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topics: Option<TopicLabels>,
}

impl Dataset {
    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    pub fn n_items(&self) -> usize {
        self.items.len()
    }

    pub fn n_interactions(&self) -> usize {
        self.sequences.iter().map(Vec::len).sum()
    }

    fn item_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_items()];
        for &i in self.sequences.iter().flatten() {
            counts[i] += 1;
        }
        counts
    }

    /// Structural checks: dense ids, matching lengths, sorted timestamps.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::UnsupportedFile(msg));
        if self.sequences.len() != self.n_users() || self.timestamps.len() != self.n_users() {
            return bad("sequence count does not match user count".into());
        }
        for (u, (seq, ts)) in self.sequences.iter().zip(&self.timestamps).enumerate() {
            if seq.len() != ts.len() {
                return bad(format!("user {u}: timestamps do not match items"));
            }
            if seq.iter().any(|&i| i >= self.n_items()) {
                return bad(format!("user {u}: item index out of range"));
            }
            if ts.windows(2).any(|w| w[0] > w[1]) || ts.iter().any(|&t| t < 0) {
                return bad(format!("user {u}: timestamps not sorted or negative"));
            }
        }
        if let Some(t) = &self.topics {
            if t.item_topic.len() != self.n_items() || t.user_topics.len() != self.n_users() {
                return bad("topic labels do not match dataset shape".into());
            }
        }
        Ok(())
    }

    /// Versioned JSON dump; floats and ids round-trip exactly.
    pub fn write_to<W: Write>(&self, out: W) -> Result<()> {
        let file = DatasetFile {
            format: DATASET_FORMAT.into(),
            version: DATASET_VERSION,
            dataset: self.clone(),
        };
        serde_json::to_writer(out, &file)?;
        Ok(())
    }

    pub fn read_from<R: Read>(input: R) -> Result<Self> {
        let file: DatasetFile = serde_json::from_reader(input)?;
        if file.format != DATASET_FORMAT || file.version != DATASET_VERSION {
            return Err(Error::UnsupportedFile(format!(
                "expected {DATASET_FORMAT} v{DATASET_VERSION}, found {} v{}",
                file.format, file.version
            )));
        }
        file.dataset.validate()?;
        Ok(file.dataset)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)?;
        std::fs::write(path, buf)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_from(std::fs::File::open(path)?)
    }
}

const DATASET_FORMAT: &str = "intentrec-dataset";
const DATASET_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct DatasetFile {
    format: String,
    version: u32,
    dataset: Dataset,
}

/// Groups interactions by user and orders each group by timestamp, keeping
/// input order among equal timestamps. Ids are assigned in order of first
/// appearance.
pub fn build_sequences(interactions: &[Interaction]) -> Dataset {
    let mut users = IdMap::default();
    let mut items = IdMap::default();
    let mut grouped: Vec<Vec<(i64, usize)>> = Vec::new();
    for row in interactions {
        let u = users.intern(&row.user);
        let i = items.intern(&row.item);
        if u == grouped.len() {
            grouped.push(Vec::new());
        }
        grouped[u].push((row.timestamp, i));
    }
    let mut sequences = Vec::with_capacity(grouped.len());
    let mut timestamps = Vec::with_capacity(grouped.len());
    for mut group in grouped {
        group.sort_by_key(|&(t, _)| t);
        timestamps.push(group.iter().map(|&(t, _)| t).collect());
        sequences.push(group.into_iter().map(|(_, i)| i).collect());
    }
    Dataset {
        users,
        items,
        sequences,
        timestamps,
        topics: None,
    }
}

/// Iteratively drops users with fewer than `k` interactions and items with
/// fewer than `k` occurrences until nothing changes, then re-densifies ids
/// preserving relative order.
pub fn filter_k_core(dataset: &Dataset, k: usize) -> Result<Dataset> {
    if k == 0 {
        return Err(Error::InvalidConfig(
            "k-core threshold must be at least 1".into(),
        ));
    }
    let mut keep_user = vec![true; dataset.n_users()];
    let mut keep_item = vec![true; dataset.n_items()];
    loop {
        let mut changed = false;
        let mut item_counts = vec![0usize; dataset.n_items()];
        for (u, seq) in dataset.sequences.iter().enumerate() {
            if !keep_user[u] {
                continue;
            }
            let n = seq.iter().filter(|&&i| keep_item[i]).count();
            if n < k {
                keep_user[u] = false;
                changed = true;
            } else {
                for &i in seq.iter().filter(|&&i| keep_item[i]) {
                    item_counts[i] += 1;
                }
            }
        }
        for (i, keep) in keep_item.iter_mut().enumerate() {
            if *keep && item_counts[i] < k {
                *keep = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let mut item_remap = vec![usize::MAX; dataset.n_items()];
    let mut items = IdMap::default();
    for (i, &keep) in keep_item.iter().enumerate() {
        if keep {
            item_remap[i] = items.intern(dataset.items.id(i).expect("dense ids"));
        }
    }
    let mut users = IdMap::default();
    let mut sequences = Vec::new();
    let mut timestamps = Vec::new();
    let mut user_topics = Vec::new();
    for (u, &keep) in keep_user.iter().enumerate() {
        if !keep {
            continue;
        }
        users.intern(dataset.users.id(u).expect("dense ids"));
        let (seq, ts): (Vec<usize>, Vec<i64>) = dataset.sequences[u]
            .iter()
            .zip(&dataset.timestamps[u])
            .filter(|(&i, _)| keep_item[i])
            .map(|(&i, &t)| (item_remap[i], t))
            .unzip();
        sequences.push(seq);
        timestamps.push(ts);
        if let Some(t) = &dataset.topics {
            user_topics.push(t.user_topics[u].clone());
        }
    }
    if users.is_empty() {
        return Err(Error::EmptyKCore {
            k,
            users: dataset.n_users(),
            items: dataset.n_items(),
            interactions: dataset.n_interactions(),
        });
    }
    let topics = dataset.topics.as_ref().map(|t| TopicLabels {
        item_topic: (0..dataset.n_items())
            .filter(|&i| keep_item[i])
            .map(|i| t.item_topic[i])
            .collect(),
        user_topics,
    });
    Ok(Dataset {
        users,
        items,
        sequences,
        timestamps,
        topics,
    })
}

/// True when every user has at least `k` interactions and every item at least `k` occurrences.
pub fn satisfies_k_core(dataset: &Dataset, k: usize) -> bool {
    dataset.sequences.iter().all(|s| s.len() >= k) && dataset.item_counts().iter().all(|&c| c >= k)
}
