//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Malformed or inconsistent input (dimension mismatch, non-finite
    /// entries, schema violations).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A configured size cap would be exceeded.
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    /// A documented precondition does not hold for the given input.
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    /// A quantity that is guaranteed by theory failed to hold numerically;
    /// the message carries the offending residuals.
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    /// An eigen- or singular-value computation lost too much accuracy to
    /// certify its output.
    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),

    /// A linear map that was required to be Hermiticity-preserving is not.
    #[error("invalid map: {0}")]
    InvalidMap(String),

    /// A spectral interval that must enclose the spectrum does not.
    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    /// A solver terminated without reaching a certified verdict.
    #[error("indeterminate: {0}")]
    Indeterminate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
