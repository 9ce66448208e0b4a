use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, IoError>;

/// Failures of the file formats and commands. Each variant maps to a stable
/// process exit code, see [`IoError::exit_code`].
#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: byte offset {offset}: {message}")]
    Format {
        path: PathBuf,
        offset: u64,
        message: String,
    },
    #[error("{path}: line {line}: {message}")]
    Labels {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{0}")]
    Mismatch(String),
    #[error("{path}: {message}")]
    Plan { path: PathBuf, message: String },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error(transparent)]
    Core(#[from] sturm_core::Error),
}

impl IoError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.into(),
            source,
        }
    }

    /// Short, stable category name used in one-line error reports.
    pub fn kind(&self) -> &'static str {
        use sturm_core::Error as E;
        match self {
            IoError::Io { .. } => "io",
            IoError::Format { .. } | IoError::Labels { .. } | IoError::Mismatch(_) => "format",
            IoError::Plan { .. } | IoError::Argument(_) => "config",
            IoError::Core(e) => match e {
                E::InfeasibleFolds(_) => "infeasible",
                E::Diverged { .. } | E::SvdFailed { .. } | E::Factorization { .. } | E::NotConjugateSymmetric { .. } => {
                    "numeric"
                }
                E::DimensionMismatch { .. } | E::LengthMismatch { .. } | E::NonFinite { .. } | E::InvalidDataset(_) => {
                    "format"
                }
                _ => "config",
            },
        }
    }

    /// Exit status for the command-line tool.
    ///
    /// | code | kind |
    /// |------|------|
    /// | 2 | usage (unknown flag, bad flag value) |
    /// | 3 | io |
    /// | 4 | format |
    /// | 5 | config |
    /// | 6 | infeasible |
    /// | 7 | numeric |
    pub fn exit_code(&self) -> u8 {
        match self.kind() {
            "io" => 3,
            "format" => 4,
            "config" => 5,
            "infeasible" => 6,
            _ => 7,
        }
    }
}
