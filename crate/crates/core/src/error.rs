use thiserror::Error;

/// Errors raised by the library. Property failures (a Jacobi violation, a
/// non-isomorphism) are returned as data, never through this type.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("grading out of range: {0}")]
    Grading(String),
    #[error("not a Carnot algebra: {0}")]
    NotCarnot(String),
    #[error("not nilpotent: {0}")]
    NotNilpotent(String),
    #[error("invalid cocycle: {0}")]
    InvalidCocycle(String),
    #[error("unverified map: {0}")]
    Unverified(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
