use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix side {side} does not match product of site dimensions {dims:?}")]
    DimensionMismatch { dims: Vec<usize>, side: usize },

    #[error("operator is not Hermitian (max asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("invalid site index {index} for an operator with {sites} sites")]
    InvalidSite { index: usize, sites: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("dimension {0} is not an odd prime")]
    NotOddPrime(usize),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("solver failed: {0}")]
    Solver(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
