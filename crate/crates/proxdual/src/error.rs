use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("constraint operator is not surjective (gram eigenvalues {min_eig:.3e} .. {max_eig:.3e})")]
    NotSurjective { min_eig: f64, max_eig: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("point outside the domain of f: {0}")]
    Domain(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("did not converge: {0}")]
    Nonconvergence(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed instance document: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
