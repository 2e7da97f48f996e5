use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("{path}:{line}:{column}: {message}")]
    Parse { path: PathBuf, line: usize, column: usize, message: String },

    #[error("invalid input: {0}")]
    Input(String),

    #[error(transparent)]
    SizeCap(qrainbow::Error),

    #[error("design failed: {0}")]
    Design(qrainbow::Error),

    #[error(transparent)]
    Compute(qrainbow::Error),

    #[error("{path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Read { .. } | CliError::Parse { .. } | CliError::Input(_) => 2,
            CliError::SizeCap(_) => 3,
            CliError::Design(_) => 4,
            CliError::Compute(_) | CliError::Write { .. } => 1,
        }
    }

    /// Library errors raised while analysing a chain.
    pub fn from_core(e: qrainbow::Error) -> Self {
        match e {
            qrainbow::Error::SizeCap { .. } => CliError::SizeCap(e),
            qrainbow::Error::InvalidArgument(msg) => CliError::Input(msg),
            other => CliError::Compute(other),
        }
    }

    /// Library errors raised by the designer.
    pub fn from_design(e: qrainbow::Error) -> Self {
        match e {
            qrainbow::Error::SizeCap { .. } => CliError::SizeCap(e),
            other => CliError::Design(other),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
