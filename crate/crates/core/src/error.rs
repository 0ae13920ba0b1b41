use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("samples are not sorted: value at index {index} is smaller than its predecessor")]
    Unsorted { index: usize },

    #[error("non-finite coordinate at index {index}")]
    NonFinite { index: usize },

    #[error(
        "cost exponent must be > 1 (got {0}); the monotone-matching reduction needs a strictly convex cost, so p = 1 is not supported"
    )]
    InvalidExponent(f64),

    #[error("invalid penalty: {0}")]
    InvalidPenalty(String),

    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invariant {which} violated while processing source point {point}: {detail}")]
    InvariantViolated {
        which: &'static str,
        point: usize,
        detail: String,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid {format} data: {msg}")]
    Format { format: &'static str, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
