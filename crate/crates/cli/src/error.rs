use std::path::PathBuf;

use thiserror::Error;

/// Failures of a CLI command, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Core(#[from] majorant_core::Error),
    #[error("snapshot {path}: {msg}")]
    Snapshot { path: PathBuf, msg: String },
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 0 success, 1 verification, 2 config, 3 stability, 4 data mismatch,
    /// 5 precondition.
    pub fn exit_code(&self) -> i32 {
        use majorant_core::Error as E;
        match self {
            CliError::Verification(_) | CliError::Io { .. } => 1,
            CliError::Config(_) => 2,
            CliError::Snapshot { .. } => 4,
            CliError::Core(e) => match e {
                E::Stability { .. } => 3,
                E::Dimension(_) | E::GridMismatch(_) | E::IndexOutOfRange { .. } => 4,
                E::Precondition(_) => 5,
                E::CgBreakdown(_) => 1,
                E::Parameter(_) | E::UnknownCase(_) | E::NotSpd(_) | E::Unsupported(_) | E::EmptyBracket(_) => 2,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
