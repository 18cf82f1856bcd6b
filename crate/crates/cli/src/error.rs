//! CLI error taxonomy, mapped to process exit codes by `main`.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, bad spec files, inconsistent combinations. Exit code 2.
    #[error("{0}")]
    Config(String),

    /// Filesystem trouble. Exit code 1.
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

impl From<calib_core::CalibError> for CliError {
    fn from(e: calib_core::CalibError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
