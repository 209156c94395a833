use thiserror::Error;

/// Errors shared across the set-computation and simulation layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operation requires a nonempty set: {0}")]
    EmptySet(&'static str),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("no robust control invariant set exists within the state constraints")]
    EmptyInvariant,

    #[error("the given set is not control invariant: the 1-step feasible set differs from it")]
    InvalidInvariant,

    #[error("no admissible input sequence exists from the given initial state")]
    Infeasible,

    #[error("state left the invariant set at t={t}: {state:?}")]
    SafetyViolation { t: usize, state: Vec<f64> },

    #[error("malformed transmission sequence: {0}")]
    MalformedSequence(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
