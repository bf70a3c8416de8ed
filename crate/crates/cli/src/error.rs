use std::io;

use rasch_doe::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, malformed input files, inconsistent options.
    #[error("{0}")]
    Usage(String),
    /// The computation itself failed (singular matrices, no convergence, ...).
    #[error("{0}")]
    Compute(String),
    /// Argument parsing failed; the message is already formatted.
    #[error("{0}")]
    Args(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Args(_) => 2,
            CliError::Compute(_) | CliError::Io { .. } => 1,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::SingularInformation
            | CoreError::SingularSupport
            | CoreError::NoBracket { .. }
            | CoreError::InfeasibleStart
            | CoreError::NonMonotone { .. }
            | CoreError::NotConverged { .. }
            | CoreError::NotInAffineHull { .. } => CliError::Compute(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Usage(format!("invalid JSON: {e}"))
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
