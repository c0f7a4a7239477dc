use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{what} out of range: {detail}")]
    OutOfRange { what: &'static str, detail: String },

    /// A computation was refused up front because it would not fit the budget.
    #[error("budget exceeded for {what}: needs {required}, limit {limit} ({estimate})")]
    BudgetExceeded {
        what: &'static str,
        required: String,
        limit: String,
        estimate: String,
    },

    /// A division that must be exact by theorem was not.
    #[error("inexact division in {0}")]
    InexactDivision(String),

    #[error("provably impossible: {0}")]
    ProvablyImpossible(String),

    #[error("search exhausted after {tries} tries: {what}")]
    SearchExhausted { what: String, tries: u64 },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
