use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An operation was called outside its contract (index out of range,
    /// mismatched horizons, schedule entry not on the curve, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Invalid configuration (bad game parameters, empty curve, degenerate
    /// observer model, malformed flag values, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed input data. The message carries the offending row when known.
    #[error("parse error: {0}")]
    Parse(String),

    /// A brute-force oracle refused an instance larger than its bound.
    #[error("instance bound exceeded: {0}")]
    Bound(String),

    /// Underlying I/O failure.
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn parse_at(row: usize, msg: impl std::fmt::Display) -> Self {
        Error::Parse(format!("row {row}: {msg}"))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
