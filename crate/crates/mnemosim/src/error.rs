use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("parameter {name} out of range: {value} (must be {bounds})")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        bounds: &'static str,
    },

    #[error("node index {node} out of range for network of {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("{context}: input too large ({got} > limit {limit})")]
    TooLarge {
        context: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("{context}: need at least {min}, got {got}")]
    TooSmall {
        context: &'static str,
        min: usize,
        got: usize,
    },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
