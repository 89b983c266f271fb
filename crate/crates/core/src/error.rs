use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by encoding, classification, and dataset handling.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Two vectors, or a vector and an index, disagree on dimensionality.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// A parameter is outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An operation was applied to a value that cannot accept it.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A dataset file could not be read.
    #[error("{}: {reason}", path.display())]
    DataLoad { path: PathBuf, reason: String },

    /// A dataset file has a malformed record. Line numbers are 1-based.
    #[error("{}:{line}: {reason}", path.display())]
    DataFormat {
        path: PathBuf,
        line: usize,
        reason: String,
    },
}

impl Error {
    pub(crate) fn invalid_argument(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for errors caused by missing or malformed input data, as opposed
    /// to misuse of the API.
    pub fn is_data_error(&self) -> bool {
        matches!(self, Error::DataLoad { .. } | Error::DataFormat { .. })
    }
}
