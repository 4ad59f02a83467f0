use std::path::PathBuf;

use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("method '{method}' is not applicable: {reason}")]
    MethodInapplicable { method: &'static str, reason: String },

    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },

    #[error("malformed system file: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Core(#[from] mifde_core::Error),
}

/// Process exit statuses.
pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if !e.is_input_error() && !matches!(e, mifde_core::Error::OverflowDomain { .. }) => {
                EXIT_NUMERICAL
            }
            _ => EXIT_INPUT,
        }
    }
}
