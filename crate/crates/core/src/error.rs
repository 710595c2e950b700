use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("operation not supported on a {0} space")]
    UnsupportedSpace(&'static str),

    #[error("invalid alpha: beta = {beta} must be positive")]
    InvalidAlpha { beta: f64 },

    #[error("insufficient data: no sample reaches distance {k} from the base point")]
    InsufficientData { k: u32 },

    #[error("insufficient curve: parameter {t} lies beyond the last sample and the curve has no extension")]
    InsufficientCurve { t: f64 },

    #[error("strategy fault at step {step}: {reason}")]
    StrategyFault { step: usize, reason: String },

    #[error("angle threshold {threshold} not met; last violation at index {index} (beta = {beta})")]
    ThresholdNotMet {
        threshold: f64,
        index: usize,
        beta: f64,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
