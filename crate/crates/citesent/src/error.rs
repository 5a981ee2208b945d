use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the pipeline stages.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("empty vocabulary: no token reached the frequency threshold")]
    EmptyVocabulary,

    #[error("unknown token: {0:?}")]
    UnknownToken(String),

    #[error("unknown label {label:?}, expected one of {expected:?}")]
    UnknownLabel { label: String, expected: Vec<String> },

    #[error("duplicate document id: {0:?}")]
    DuplicateDocId(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("empty polarity class: no sentence matched a strictly {0} phrase")]
    EmptyPolarityClass(&'static str),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("label sequences differ in length: {true_len} vs {pred_len}")]
    LengthMismatch { true_len: usize, pred_len: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
