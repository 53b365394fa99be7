use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Raised when the program under test cannot answer a query.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("oracle failed at {point}: {message}")]
pub struct OracleError {
    /// The queried point, rendered as `x` or `<x1, ..., xm>`.
    pub point: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid budget: {0}")]
    InvalidBudget(String),
    #[error("dimension mismatch: expected {expected} coordinates, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error(
        "fraction {fraction} of a domain of size {domain_size} is not a whole number of points"
    )]
    UnrealizableFraction {
        fraction: String,
        domain_size: String,
    },
    #[error("domain of {bits} bits exceeds the limit of {limit} bits for this operation")]
    DomainTooLarge { bits: u64, limit: u64 },
    #[error("invalid probability: {0}")]
    InvalidProbability(String),
    #[error("invalid fault specification: {0}")]
    InvalidFault(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}
