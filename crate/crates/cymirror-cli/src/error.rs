//! Error categories and their exit codes.

use thiserror::Error;

/// Driver failure; each category has its own exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or configuration (exit 1).
    #[error("configuration error: {0}")]
    Config(String),
    /// Unreadable or invalid input data, or a failed computation on it (exit 2).
    #[error("input error: {0}")]
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

/// Exit status when a report contains a failing check.
pub const CHECK_FAILURE: i32 = 3;

/// Maps any displayable library error to an input error.
pub fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}
