//! CLI error type with stable exit codes.

use laneopt_core::DomainError;
use thiserror::Error;

/// Exit codes: 0 success, 2 input error, 3 domain precondition,
/// 4 I/O failure, 5 verification failure.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Io(_) => 4,
            CliError::Verification(_) => 5,
        }
    }
}

impl From<DomainError> for CliError {
    fn from(err: DomainError) -> Self {
        match err {
            // Asking for a managed-lane analysis on a one-lane freeway is a
            // violated model precondition; everything else is bad input.
            DomainError::ManagedLaneRequiresTwoLanes(_) => CliError::Domain(err.to_string()),
            _ => CliError::Input(err.to_string()),
        }
    }
}

pub fn io_error(context: &str, path: &std::path::Path, err: std::io::Error) -> CliError {
    CliError::Io(format!("{context} {}: {err}", path.display()))
}

pub type CliResult<T> = Result<T, CliError>;
