use thiserror::Error;

/// Errors produced by the estimation, testing and ingestion layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("value {value} outside domain {domain}")]
    Domain { value: f64, domain: &'static str },

    /// Observation at the origin, which has no angle.
    #[error("degenerate observation: x + y = 0")]
    Degenerate,

    /// Every radius in the tail is equal, so the log-spacing mean is zero.
    #[error("degenerate tail: all {k} radii are equal")]
    DegenerateTail { k: usize },

    /// The angular weights of a T-statistic sum to zero.
    #[error("degenerate weights: angular weight sum is zero")]
    DegenerateWeights,

    /// Too many bootstrap resamples failed for the decision rules to be trusted.
    #[error("invalid bootstrap run: {failed} of {total} resamples failed")]
    InvalidRun { failed: usize, total: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("empty series: {0}")]
    EmptySeries(String),

    #[error("metadata error: {0}")]
    Metadata(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
