use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum MagicError {
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("matrix is not Hermitian within tolerance (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("operator is not a valid quantum state: {0}")]
    NotAState(String),

    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),

    #[error("Kraus operators are not trace preserving (deviation {0:.3e})")]
    NotTracePreserving(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),

    #[error("negative part of the quasiprobability decomposition is not CPTP (residual {0:.3e})")]
    NotCptpResidual(f64),

    #[error("resource state is free; the requested bound is undefined")]
    FreeResourceState,

    #[error("missing fixture: {0}")]
    MissingFixture(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("cache i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, MagicError>;
