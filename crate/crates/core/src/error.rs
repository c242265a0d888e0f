use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QceError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("trace is {0}, expected 1")]
    BadTrace(f64),

    #[error("not completely positive (min Choi eigenvalue {0:.3e})")]
    NotCompletelyPositive(f64),

    #[error("not trace preserving (deviation {0:.3e})")]
    NotTracePreserving(f64),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl QceError {
    /// Errors caused by the caller's data, as opposed to solver breakdowns.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, QceError::Numerical(_))
    }
}

pub type Result<T> = std::result::Result<T, QceError>;
