use crate::extension::LimitReport;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at byte {at}: {msg}")]
    Parse { at: usize, msg: String },

    #[error("evaluation failed after {retries} resampling attempts: {msg}")]
    EvaluationFailure { retries: usize, msg: String },

    #[error("tiling covers {coverage} of the target, below the required {required}")]
    TilingTooCoarse { coverage: String, required: String },

    #[error("normalized ranks did not stabilize within the schedule")]
    NotStabilized(Box<LimitReport>),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn parse(at: usize, msg: impl Into<String>) -> Self {
        Error::Parse { at, msg: msg.into() }
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
