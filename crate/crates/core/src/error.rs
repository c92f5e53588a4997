use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("input must be a positive integer")]
    ZeroInput,
    #[error("{a} is not invertible modulo {modulus}")]
    NotCoprime { a: i64, modulus: u64 },
    #[error("{what} = {value} exceeds the configured cap {cap}")]
    CapExceeded {
        what: &'static str,
        value: String,
        cap: String,
    },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("negative radius {0}")]
    NegativeRadius(String),
    #[error("sets live in different spaces: p = {0} and p = {1}")]
    MismatchedPrimes(u64, u64),
    #[error("need {needed} digits but the stream has {available}")]
    InsufficientDigits { needed: usize, available: usize },
    #[error("{e} does not divide {d}")]
    NotDivisor { e: u64, d: u64 },
    #[error("integer overflow while {0}")]
    Overflow(&'static str),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("internal invariant broken: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn cap(what: &'static str, value: impl ToString, cap: impl ToString) -> Self {
        Error::CapExceeded {
            what,
            value: value.to_string(),
            cap: cap.to_string(),
        }
    }
}
