use thiserror::Error;

/// Errors raised by the model, solver, and harness layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid MDP: {0}")]
    InvalidMdp(String),

    #[error("transition row for (state {state}, action {action}) is not a distribution: {reason}")]
    NonStochasticRow {
        state: usize,
        action: usize,
        reason: String,
    },

    #[error("policy does not match the state space: {0}")]
    PolicyMismatch(String),

    #[error("invalid belief: {0}")]
    InvalidBelief(String),

    #[error("invalid observation: {0}")]
    InvalidObservation(String),

    #[error("invalid temperature {0}: must be positive and finite")]
    InvalidTemperature(f64),

    #[error("risk-seeking CGF requires a nonnegative argument, got {0}")]
    NegativeBeta(f64),

    #[error("temperature schedule needs at least two actions, got {0}")]
    TooFewActions(usize),

    #[error("episode index must be at least 1")]
    ZeroEpisode,

    #[error("invalid environment: {0}")]
    InvalidEnv(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for failures caused by numerics rather than bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NonFinite(_))
    }
}
