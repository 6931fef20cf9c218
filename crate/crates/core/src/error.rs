use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the simulator and its analysis layers.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The joint state space is too large for exhaustive global-maximum search.
    #[error(
        "global maximum requires scanning 2^{bits} joint configurations (limit 2^{limit}); \
         run without normalization (normalize=false / --no-normalize)"
    )]
    StateSpaceTooLarge { bits: usize, limit: usize },

    #[error("sample `{0}` is empty")]
    EmptySample(&'static str),

    #[error("unknown sweep parameter `{0}`")]
    UnknownParameter(String),

    #[error("plan is empty: {0}")]
    EmptyPlan(String),

    #[error("malformed landscape dump at line {line}: {reason}")]
    MalformedDump { line: usize, reason: String },

    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
