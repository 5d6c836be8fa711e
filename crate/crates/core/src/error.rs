use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid period set: {0}")]
    InvalidPeriodSet(&'static str),

    #[error("k = {k} is not a valid subspace index for period {period}")]
    InvalidSubspaceIndex { period: usize, k: usize },

    #[error("period {period} does not divide length {len}")]
    NotADivisor { period: usize, len: usize },

    #[error("unsupported length {0} (must be in 1..=65536)")]
    UnsupportedLength(usize),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("factorization requires N >= 3, got {0}")]
    FactorizationUnsupported(usize),

    #[error("matrix is singular or ill-conditioned (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("no periodic content above threshold")]
    NoPeriodicContent,

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("unknown method `{0}`")]
    UnknownMethod(String),

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("numerical failure: {0}")]
    Numerical(String),
}
