use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: schema violation at `{at}`: {message}")]
    Schema { path: PathBuf, at: String, message: String },

    #[error("{path}: invalid state: {source}")]
    InvalidState { path: PathBuf, source: weakcoh_core::Error },

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Core(#[from] weakcoh_core::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("figure sweep: {0}")]
    Sweep(String),
}

impl CliError {
    /// Process exit status: every error is a usage or input error.
    pub fn exit_code(&self) -> u8 {
        2
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
