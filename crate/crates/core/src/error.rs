use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by every layer of the toolkit.
///
/// Each variant belongs to one [`ErrorKind`], which front ends use to pick an
/// exit status.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("nothing to fragment")]
    EmptyInput,

    #[error("no inverse of zero")]
    ZeroInverse,

    #[error("empty coefficient list")]
    EmptyPolynomial,

    #[error("singular matrix")]
    SingularMatrix,

    #[error("undefined correlation: zero variance")]
    ZeroVariance,

    #[error("threshold not met: need {needed}, have {available}, missing {missing:?}")]
    Threshold {
        needed: usize,
        available: usize,
        missing: Vec<usize>,
    },

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("malformed fragment: {0}")]
    Format(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("site {site}: {message}")]
    Backend { site: usize, message: String },

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// Coarse classification of an [`Error`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parameter,
    Io,
    Threshold,
    Integrity,
}

impl Error {
    pub fn param(msg: impl Into<String>) -> Self {
        Error::Param(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn threshold(needed: usize, available: usize, missing: Vec<usize>) -> Self {
        Error::Threshold {
            needed,
            available,
            missing,
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Param(_)
            | Error::EmptyInput
            | Error::ZeroInverse
            | Error::EmptyPolynomial
            | Error::ZeroVariance => ErrorKind::Parameter,
            Error::Threshold { .. } => ErrorKind::Threshold,
            Error::Integrity(_) | Error::Format(_) | Error::SingularMatrix => ErrorKind::Integrity,
            Error::Io { .. } | Error::Backend { .. } | Error::Json(_) | Error::Csv(_) => {
                ErrorKind::Io
            }
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
