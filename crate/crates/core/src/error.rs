use thiserror::Error;

use crate::estimator::EstimateReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coordinate {index} is fixed twice with conflicting bits")]
    DuplicateCoordinate { index: usize },

    #[error("coordinate {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A single Bernoulli estimation ran past its draw limit before collecting
    /// enough successes.
    #[error("draw budget exhausted after {draws} draws ({successes} of {target} successes)")]
    BudgetExhausted {
        draws: u64,
        successes: u64,
        target: u64,
    },

    /// The global sample budget of an estimation run was exceeded. Carries the
    /// report over the outer iterations that did complete.
    #[error("sample budget of {limit} exceeded ({used} samples used)")]
    SampleBudget {
        used: u64,
        limit: u64,
        partial: Box<EstimateReport>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("declared relations contain a cycle through element {element}")]
    Cycle { element: usize },

    #[error("fixing pair ({a}, {b}) contradicts the existing order")]
    Contradiction { a: usize, b: usize },

    #[error("instance too large: {what} is {size}, cap is {cap}")]
    TooLarge {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("bit string {0} encodes no linear extension")]
    InvalidEncoding(String),

    #[error("conditioning prefix has zero mass")]
    ZeroMassPrefix,
}
