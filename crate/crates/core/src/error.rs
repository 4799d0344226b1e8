use thiserror::Error;

/// Errors shared across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("point {0} outside the domain")]
    OutsideDomain(String),
    #[error("value is not dyadic: {0}")]
    NotDyadic(String),
    #[error("malformed word: {0}")]
    BadWord(String),
    #[error("invalid partition: {0}")]
    BadPartition(String),
    #[error("not a dyadic rearrangement of the required interval: {0}")]
    NotRearrangement(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("search bound {0} exceeded")]
    BoundExceeded(usize),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("validation mismatch at n={n}: got {got}, expected {expected}")]
    ValidationMismatch { n: usize, got: u128, expected: u128 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
