//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration invariant was violated. The message names the field.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Matrix/vector dimensions do not agree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A solver or iteration produced non-finite or degenerate values.
    #[error("numerical failure: {0}")]
    Numerical(String),
}
