use thiserror::Error;

/// Crate-wide error type. Precondition violations on hot paths (dimension
/// mismatches, out-of-range flip counts) panic instead; everything reachable
/// from file input, user configuration, or parameter plumbing lands here.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}:{line}: {message}")]
    Dimacs {
        path: String,
        line: usize,
        message: String,
    },

    #[error("planted assignment unsatisfied at clause {clause}")]
    UnsatisfiedPlanted { clause: usize },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("config: {0}")]
    ConfigValue(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
