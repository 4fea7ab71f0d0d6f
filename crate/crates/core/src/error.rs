use thiserror::Error;

/// Inconsistent auction inputs: vectors of the wrong length, broken bid
/// rationality, malformed allocation orders.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("{what}: expected length {expected}, found {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("catalog must contain at least one dataset type")]
    EmptyCatalog,
    #[error("bid for type {type_index}: quantity {quantity} with unit price {unit_price} (zero quantity must pair with zero price)")]
    Rationality {
        type_index: usize,
        quantity: u32,
        unit_price: u32,
    },
    #[error("price for type {type_index} must be positive")]
    NonPositivePrice { type_index: usize },
    #[error("allocation order is not a permutation of 0..{n}")]
    InvalidOrder { n: usize },
    #[error("buyer id {id} out of range for {n} buyers")]
    UnknownBuyer { id: usize, n: usize },
    #[error("pricing threshold must be positive")]
    NonPositiveThreshold,
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
}

/// Errors raised by the exponential mechanism and the baseline selectors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MechanismError {
    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
    #[error("sensitivity must be positive and finite, got {0}")]
    InvalidSensitivity(f64),
    #[error("candidate set is empty")]
    EmptyCandidates,
    #[error("{candidates} candidates but {scores} scores")]
    ScoreCountMismatch { candidates: usize, scores: usize },
    #[error("score {index} is not finite: {value}")]
    NonFiniteScore { index: usize, value: f64 },
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(f64),
    #[error("arithmetic overflow computing sensitivity bound")]
    Overflow,
    #[error("sensitivity bound arguments must be positive")]
    NonPositiveBoundArgument,
}

/// Invalid scenario or experiment configuration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{field}: {reason}")]
    Invalid { field: String, reason: String },
}

impl ConfigError {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

/// Top-level error for trial and sweep execution.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Mechanism(#[from] MechanismError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("oracle refused input: {0}")]
    OracleLimit(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
