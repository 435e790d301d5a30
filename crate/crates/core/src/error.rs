use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length {len} is not a power of two >= 2")]
    FftLength { len: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("search needs {trials} trial evaluations, budget is {budget}")]
    BudgetExceeded { trials: u128, budget: u64 },

    #[error("channel delay spread {delay} exceeds cyclic prefix {n_cp}")]
    DelaySpread { delay: usize, n_cp: usize },

    #[error("sequence has no anchor (pilot) cell; phase ambiguity cannot be resolved")]
    Unanchored,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
