use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Requested degree or kernel order exceeds what the recurrence table holds.
    #[error("capacity exceeded: requested {requested}, table supports {capacity}")]
    Capacity { requested: usize, capacity: usize },

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The point pair is too close to the diagonal for the determinant route.
    #[error("near-diagonal degeneracy: relative discriminant {relative_delta:e}")]
    Degenerate { relative_delta: f64 },

    /// A quantity that is nonnegative or bounded in exact arithmetic came out
    /// beyond rounding tolerance.
    #[error("numerical consistency violation: {0}")]
    Consistency(String),

    #[error("resource cap exceeded: {0}")]
    Budget(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn consistency(msg: impl Into<String>) -> Self {
        Error::Consistency(msg.into())
    }
}
