use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed text input (circuit file, interchange file, DIMACS, ...).
    #[error("parse error: {0}")]
    Parse(String),

    /// An operator or register would exceed the dimension caps.
    #[error("dimension guard: {0}")]
    DimensionGuard(String),

    /// Input violates a structural invariant (non-unitary gate,
    /// non-Hermitian term, mismatched sizes, zero vector, ...).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// The iterative eigensolver hit its iteration cap. Carries the best
    /// estimate so the failure is inspectable rather than silent.
    #[error(
        "eigensolver did not converge after {iterations} iterations \
         (best estimate {lambda_min}, residual {residual})"
    )]
    NoConvergence {
        iterations: usize,
        lambda_min: f64,
        residual: f64,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
