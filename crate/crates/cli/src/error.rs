use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Process exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    /// The run completed but its witness is rejected by the problem.
    pub const REJECTED: i32 = 1;
    pub const STEP_CAP: i32 = 2;
    pub const CONFIG: i32 = 3;
    pub const INVARIANT: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("malformed trace: {0}")]
    Trace(String),

    #[error("replay diverged at step {step}: {detail}")]
    ReplayMismatch { step: usize, detail: String },

    #[error(transparent)]
    Core(#[from] kspace_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } | CliError::Trace(_) => exit::CONFIG,
            CliError::ReplayMismatch { .. } => exit::REJECTED,
            CliError::Core(kspace_core::Error::StepCapExceeded { .. }) => exit::STEP_CAP,
            CliError::Core(_) => exit::INVARIANT,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
