use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("table of limit {limit} needs {needed} bytes, over the memory cap of {cap} bytes")]
    MemoryCap { limit: u64, needed: u64, cap: u64 },

    #[error("{value} is outside the table range [1, {limit}]")]
    OutOfRange { value: String, limit: u64 },

    #[error("argument must be positive")]
    NonPositive,

    #[error("value {0} does not fit the single-value search (u64)")]
    TooLarge(String),

    #[error("complexity {value} of {n} overflows the 8-bit table entry")]
    EntryOverflow { n: u64, value: u32 },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("arity mismatch: polynomial has {expected} variables, got {got} exponents")]
    Arity { expected: usize, got: usize },

    #[error("cannot certify: {0}")]
    Indeterminate(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid table file: {0}")]
    BadTableFile(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
