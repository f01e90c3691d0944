use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller-supplied value violates a precondition (bad index, shape
    /// mismatch, empty subset, K out of range, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An operation that needs a connected graph got a disconnected one.
    #[error("graph is disconnected: {0}")]
    Disconnected(String),

    /// A run configuration is inconsistent (r-schedule too large, wrong
    /// variant options, missing filterbank, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Numerical failure (eigensolver did not converge, NaN in input, ...).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// A constructed object failed a runtime verification (UEP condition,
    /// frame tightness).
    #[error("verification failed: {0}")]
    Verification(String),

    /// A file could not be parsed.
    #[error("parse error in {path}, line {line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }

    /// True for errors caused by unreadable or malformed files, as opposed
    /// to validation or verification failures on well-formed data.
    pub fn is_io_or_parse(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::Io(_) | Error::Json(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
