use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid exponent {0}: a out of (0,1]")]
    InvalidExponent(f64),

    #[error("schedule rejected at n = {index}: {reason}")]
    ScheduleRejected { index: u64, reason: String },

    #[error("tail integral diverges: {0}")]
    Divergent(String),

    #[error("bound violated: {what} = {value} exceeds {bound}")]
    BoundViolated { what: String, value: f64, bound: f64 },

    #[error("block search exhausted for k = {k}: N would exceed {limit}")]
    SearchExhausted { k: u32, limit: u64 },

    #[error("horizon {horizon} exceeds memory budget {budget}")]
    HorizonOverflow { horizon: u64, budget: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error in {path} at line {line}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
