use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// A generator spec could not be parsed; `token` is the offending piece.
    #[error("invalid generator spec: {reason} (at `{token}`)")]
    Generator { token: String, reason: String },

    #[error("estimation failed: {0}")]
    Estimation(String),

    #[error("invalid sequence file: {0}")]
    SequenceFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
