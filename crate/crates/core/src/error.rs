//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by the pipeline. The CLI maps each variant to an exit code.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed input text or JSON.
    #[error("parse error: {0}")]
    Parse(String),
    /// Input violates a structural invariant.
    #[error("validation error: {0}")]
    Validation(String),
    /// The construction could not be completed.
    #[error("construction error: {0}")]
    Construction(String),
    /// Parameters outside the documented range.
    #[error("invalid parameters: {0}")]
    Parameter(String),
    /// A job exceeded a resource guard.
    #[error("resource guard: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;
