use thiserror::Error;

/// Errors raised by the counting engine and its front ends.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),
    /// An internal consistency check failed at runtime.
    #[error("invariant violated: {0}")]
    Invariant(String),
    /// A configuration value is out of range.
    #[error("configuration error: {0}")]
    Config(String),
    /// Exhaustive enumeration was asked to cover too many variables.
    #[error("{vars} variables exceed the enumeration cap of {cap}")]
    TooLarge { vars: usize, cap: usize },
    /// Malformed DIMACS or decomposition text.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Contract(msg.into()))
}
