use thiserror::Error;

/// Failures of the command-line runner, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),

    #[error("acceptance failed: {0}")]
    Acceptance(String),

    #[error(transparent)]
    Numerical(#[from] sphmean::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for failed acceptance checks, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Acceptance(_) => 2,
            _ => 1,
        }
    }
}

pub(crate) fn field(name: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("{name}: {reason}"))
}
