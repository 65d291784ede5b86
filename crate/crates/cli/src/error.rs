use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad or inconsistent configuration; nothing was run.
    #[error("configuration error: {0}")]
    Config(String),

    /// Some jobs of a stage failed while the rest completed.
    #[error("{failed} of {total} jobs failed: {summary}")]
    Partial { failed: usize, total: usize, summary: String },

    #[error("missing inputs: {}", .0.join(", "))]
    MissingInputs(Vec<String>),

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] nestab_core::Error),

    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 2 for configuration errors, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::MissingInputs(_) => 2,
            CliError::Core(nestab_core::Error::Config(_)) => 2,
            _ => 1,
        }
    }
}
