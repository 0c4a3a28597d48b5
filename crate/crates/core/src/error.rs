//! Error type shared by all numerical routines.

use thiserror::Error;

/// Errors raised by the library.
///
/// `Param` and `Domain` mean the caller asked for something outside the
/// contract of an operation; `Numerical` and `Contour` mean an internal
/// diagnostic tripped (branch check, invariant violation, residual too
/// large) and the result would not be trustworthy.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numerical diagnostic failure: {0}")]
    Numerical(String),
    #[error("contour failure at x = {x}: {msg}")]
    Contour { x: f64, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn param(msg: impl Into<String>) -> Self {
        Error::Param(msg.into())
    }
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
