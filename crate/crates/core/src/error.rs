use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed or out-of-range input.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Input is well formed but the computation would not mean what it claims
    /// (characteristic 2, stabilizer orders not invertible, bad primes).
    #[error("precondition rejected: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// A search gave up within its budget. Never a wrong answer.
    #[error("undetermined: {0}")]
    Undetermined(String),
    /// An internal consistency check failed. Always a bug.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
