use std::path::{Path, PathBuf};

use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, values or file contents.
    #[error("{0}")]
    Usage(String),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Numerical(#[from] gptshape::Error),

    /// A curve failed the closed/simple check required for comparison.
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("{failed} of {total} demo cells failed")]
    DemoFailures { failed: usize, total: usize },
}

impl CliError {
    /// 1 for usage and input problems, 2 for numerical or method failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 1,
            CliError::Numerical(_) | CliError::InvalidCurve(_) | CliError::DemoFailures { .. } => 2,
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
