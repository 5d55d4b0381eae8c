use thiserror::Error;

/// Errors produced while constructing, searching, encoding or decoding codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("code length {0} outside supported range 2..=24")]
    InvalidLength(usize),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("read threshold {0} outside 1..=2")]
    InvalidThreshold(u8),

    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },

    #[error("constituent code must contain at least one vector")]
    EmptyCode,

    #[error("weight parameter u={0} must be at least 1")]
    InvalidWeight(usize),

    #[error("invalid permutation pattern for u={u}, n={n}: {reason}")]
    InvalidPattern { u: usize, n: usize, reason: String },

    #[error("operation requires even n, got {0}")]
    OddLength(usize),

    #[error("pattern families rejected: {0}")]
    FamilyRejected(String),

    #[error("no shipped pattern family for u={u}, n={n}")]
    NotShipped { u: usize, n: usize },

    #[error("no tabulated count for u={u}, n={n}")]
    OutOfTable { u: usize, n: usize },

    #[error("{count} candidate supports for u={u}, n={n} exceed the exact-search limit")]
    SearchSpaceTooLarge { u: usize, n: usize, count: u64 },

    #[error("page {page} message {index} out of range (page holds {count} messages)")]
    MessageOutOfRange {
        page: u8,
        index: usize,
        count: usize,
    },

    #[error("no dominated pair between first-page message {m1} and second-page message {m2}")]
    NoDominatedPair { m1: usize, m2: usize },

    #[error("state {0} is not reachable by this code")]
    UnreachableState(String),

    #[error("sum rate undefined for M1={m1}, M2={m2}, n={n}")]
    InvalidRate { m1: u64, m2: u64, n: usize },

    #[error("rate report range {0}..={1} outside 3..=15")]
    InvalidRange(usize, usize),

    #[error("malformed descriptor: {0}")]
    Descriptor(String),
}

pub type Result<T> = std::result::Result<T, Error>;
