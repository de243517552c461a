use std::path::PathBuf;

use rdsnet_core::likelihood::LikelihoodError;
use rdsnet_core::vine::VineError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("solver did not converge; results were written to {0}")]
    Unconverged(PathBuf),
    #[error("early termination: {0}")]
    EarlyTermination(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
}

impl CliError {
    /// Process exit status: 2 invalid input, 3 unconverged solver,
    /// 4 early termination, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Parse { .. } => 2,
            CliError::Unconverged(_) => 3,
            CliError::EarlyTermination(_) => 4,
            CliError::Io { .. } => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

impl From<VineError> for CliError {
    fn from(e: VineError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<LikelihoodError> for CliError {
    fn from(e: LikelihoodError) -> Self {
        CliError::Validation(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
