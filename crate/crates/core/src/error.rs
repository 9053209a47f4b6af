use thiserror::Error;

use crate::numeric::NumericError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("out of window: {0}")]
    OutOfWindow(String),
    #[error("iteration cap of {iterations} reached with residual {residual:e}")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("malformed input: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}
