use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not unitary (max deviation from identity {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("{what} = {value} is out of range ({expected})")]
    OutOfRange {
        what: &'static str,
        value: String,
        expected: &'static str,
    },

    #[error("resource budget exceeded: {what} needs {requested} bytes, budget is {budget} bytes")]
    BudgetExceeded {
        what: &'static str,
        requested: u128,
        budget: u64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("measurement oracle exhausted after {0} samples")]
    OracleExhausted(u64),

    #[error("channel oracle only accepts a single non-adaptive query plan")]
    AdaptiveQuery,

    #[error("ensemble is not symmetric under the adjoint")]
    NonSymmetric,

    #[error("net must contain at least one unitary")]
    EmptyNet,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn out_of_range(
    what: &'static str,
    value: impl std::fmt::Display,
    expected: &'static str,
) -> Error {
    Error::OutOfRange {
        what,
        value: value.to_string(),
        expected,
    }
}
