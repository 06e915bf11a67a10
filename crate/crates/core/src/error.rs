use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("integer overflow: {0}")]
    Overflow(String),
    #[error("invalid partition: task {task} at depth {depth} (only {tasks} prefixes)")]
    InvalidPartition { depth: usize, task: u64, tasks: u64 },
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("{0} is not a supported prime")]
    NotPrime(u64),
    #[error("regularity violation at level {level}: {detail}")]
    Regularity { level: u32, detail: String },
    #[error("budget exceeded: {needed} exceeds the limit {limit}")]
    Budget { needed: String, limit: String },
    #[error("invalid discriminant {0}: must be negative and congruent to 0 or 1 mod 4")]
    InvalidDiscriminant(i64),
    #[error("accumulator configuration mismatch: {0}")]
    ConfigMismatch(String),
    #[error("empty accumulator")]
    EmptyAccumulator,
    #[error("fundamental-domain reduction did not terminate after {0} steps")]
    NonTermination(usize),
    #[error("cells do not partition the fundamental domain: {0}")]
    NotAPartition(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}
