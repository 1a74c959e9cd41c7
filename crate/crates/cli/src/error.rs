use std::path::PathBuf;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VERIFY_FAILED: i32 = 1;
    pub const SCHEMA: i32 = 2;
    pub const SEMANTIC: i32 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path} does not match the expected schema: {source}")]
    Schema {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{0}")]
    Semantic(#[from] dirq_core::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Schema { .. } | CliError::Usage(_) => exit::SCHEMA,
            CliError::Semantic(_) => exit::SEMANTIC,
        }
    }
}
