use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite input value {0}")]
    NonFinite(f64),

    #[error("index {index} out of range [0, {max}]")]
    IndexOutOfRange { index: u64, max: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("zero prior probability at interior lattice point {0}; boundary undefined")]
    ZeroPrior(usize),

    #[error("decision boundaries are not strictly increasing at position {0}")]
    NonMonotoneBoundaries(usize),

    #[error("value {x} outside the domain of {function}")]
    Domain { function: &'static str, x: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
