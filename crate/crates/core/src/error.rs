use thiserror::Error;

/// Errors raised by the verification toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Inputs are individually valid but violate a stated precondition
    /// (typically a divergent weighted integral).
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A sampled integrand value was not finite.
    #[error("non-finite integrand sample at r = {r:e}")]
    Evaluation { r: f64 },
    /// A closed-form symbol was evaluated where its denominator vanishes.
    #[error("singular point: {0}")]
    Singular(String),
    /// An exact or numerical check did not hold.
    #[error("verification failed: {0}")]
    Verification(String),
    /// Dense factorisation hit a numerically singular matrix.
    #[error("ill-conditioned problem: {0}")]
    Conditioning(String),
    /// Finite-element assembly was asked for incompatible constraints.
    #[error("assembly error: {0}")]
    Assembly(String),
    /// Invalid parameter record.
    #[error("invalid parameters: {0}")]
    Parameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
