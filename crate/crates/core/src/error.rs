use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range for {what} of size {len}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },
    #[error("sequence is empty")]
    EmptySequence,
    #[error("sequence of length {len} exceeds max_len {max_len}")]
    SequenceTooLong { len: usize, max_len: usize },
    #[error("sequence of length {len} is too short; need at least {min}")]
    SequenceTooShort { len: usize, min: usize },
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("empty dataset: {0}")]
    EmptyDataset(String),
    #[error(
        "k-core filter (k = {k}) removed everything: started from {users} users, \
         {items} items, {interactions} interactions"
    )]
    EmptyKCore {
        k: usize,
        users: usize,
        items: usize,
        interactions: usize,
    },
    #[error("input format mismatch: {malformed} of {total} lines malformed")]
    FormatMismatch { malformed: usize, total: usize },
    #[error("target item {0} is in the excluded set")]
    TargetExcluded(usize),
    #[error("empty recommendation list for user {0}")]
    EmptyList(usize),
    #[error("no users qualify: {0}")]
    NoQualifyingUsers(String),
    #[error("unsupported file: {0}")]
    UnsupportedFile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
