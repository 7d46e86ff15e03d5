use std::path::PathBuf;

use thiserror::Error;

use crate::optimize::TraceEntry;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("image contains a non-finite value at index {0}")]
    NonFinite(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("malformed {kind} file: {reason}")]
    Malformed { kind: &'static str, reason: String },

    #[error("cnn layer {layer}: {reason}")]
    CnnLayer { layer: usize, reason: String },

    #[error("line search failed to find an acceptable step after {halvings} halvings")]
    LineSearchFloor { halvings: usize },

    #[error("objective became non-finite at iteration {iteration}")]
    Diverged { iteration: usize },

    #[error("solver aborted at iteration {iteration}: {source}")]
    Aborted {
        iteration: usize,
        #[source]
        source: Box<Error>,
        trace: Vec<TraceEntry>,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Iteration trace recorded before an aborted solve, if any.
    pub fn trace(&self) -> Option<&[TraceEntry]> {
        match self {
            Error::Aborted { trace, .. } => Some(trace),
            _ => None,
        }
    }

    pub(crate) fn dims(expected: impl ToString, actual: impl ToString) -> Self {
        Error::DimensionMismatch {
            expected: expected.to_string(),
            actual: actual.to_string(),
        }
    }
}
