//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors produced by grid construction, projection, oracles and game loops.
#[derive(Debug, Error)]
pub enum CalibError {
    /// An argument is outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Vector or matrix dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The forecast/observe alternation was broken.
    #[error("protocol violation: {0}")]
    Protocol(String),

    /// A run configuration is inconsistent (e.g. contrarian Nature against a
    /// randomized forecaster).
    #[error("configuration error: {0}")]
    Config(String),

    /// The minimax solver failed to certify its solution.
    #[error("solver failure: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, CalibError>;
