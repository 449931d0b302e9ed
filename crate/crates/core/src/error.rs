use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("unknown token {0:?} (vocabulary is closed in build mode)")]
    UnknownToken(String),

    #[error("position {0} is out of range or points at a sentence terminator")]
    InvalidPosition(usize),

    #[error("sentence count mismatch: {what} has {found} lines, expected {expected}")]
    CountMismatch {
        what: &'static str,
        found: usize,
        expected: usize,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("bundle format version {found} is not supported (expected {expected})")]
    BundleVersion { found: u32, expected: u32 },

    #[error("corrupt bundle: {0}")]
    BundleCorrupt(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub(crate) fn format(line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Format { .. }
            | Error::UnknownToken(_)
            | Error::InvalidPosition(_)
            | Error::CountMismatch { .. } => 2,
            Error::BundleVersion { .. } | Error::BundleCorrupt(_) => 3,
            Error::Io { .. } => 4,
        }
    }
}
