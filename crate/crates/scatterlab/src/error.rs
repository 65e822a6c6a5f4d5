use std::path::{Path, PathBuf};

/// Failures surfaced by the file formats and the command line.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input: malformed files, out-of-range parameters, unusable flags.
    #[error("{0}")]
    Invalid(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Self::Invalid(msg.into())
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 1 for invalid input, 2 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Invalid(_) => 1,
            Self::Io { .. } => 2,
        }
    }
}

impl From<scatterlab_core::Error> for CliError {
    fn from(e: scatterlab_core::Error) -> Self {
        Self::Invalid(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
