use thiserror::Error;

/// Errors raised by the exact computations.
///
/// Every cap-related failure is reported as [`Error::CapExceeded`] so that callers
/// can turn it into an "inconclusive" verdict instead of a wrong answer.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("total weight zero")]
    ZeroWeight,

    #[error("zero-probability conditioning event: {0}")]
    ZeroProbability(String),

    #[error("cap exceeded: {what} needs {needed} but the cap is {cap}")]
    CapExceeded { what: String, needed: u128, cap: u128 },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn zero_prob(msg: impl Into<String>) -> Self {
        Error::ZeroProbability(msg.into())
    }

    pub(crate) fn cap(what: impl Into<String>, needed: u128, cap: u128) -> Self {
        Error::CapExceeded {
            what: what.into(),
            needed,
            cap,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
