//! Crate-wide error type.
//!
//! Errors fall into two broad classes: invalid inputs (bad dimensions,
//! non-Hermitian operators, malformed files) and numeric failures
//! (non-convergence, violated internal certificates). The CLI maps the
//! former to exit code 2 and the latter to exit code 3.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operator is not hermitian: defect {defect:.3e} exceeds tolerance {tolerance:.3e}")]
    NotHermitian { defect: f64, tolerance: f64 },

    #[error("operator is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("eigensolver did not converge within {max_iterations} iterations")]
    EigenConvergence { max_iterations: usize },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by the caller's input rather than a numeric
    /// breakdown inside the library.
    pub fn is_input(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch(_)
                | Error::NotHermitian { .. }
                | Error::NotPositiveSemidefinite { .. }
                | Error::InvalidInput(_)
                | Error::Io(_)
                | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
