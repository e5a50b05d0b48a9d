use thiserror::Error;

/// Errors produced by the measure, approximant and harness layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("weight index {index} out of range for a basis of {len} weights")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("measures live on different weight bases")]
    BasisMismatch,

    #[error("support of {points} points exceeds the limit of {limit}")]
    ResourceLimit { points: usize, limit: usize },

    #[error("variance {variance} does not exceed mean {mean}; negative binomial matching needs overdispersion")]
    Underdispersed { mean: f64, variance: f64 },

    #[error("the symmetric bound needs an even s, got {0}")]
    OddS(u32),

    #[error("factorial moment {side}{k} differs: {f} vs {g}")]
    MomentMismatch { k: u32, side: char, f: f64, g: f64 },

    #[error("rate fit needs at least 3 positive points, got {0}")]
    DegenerateFit(usize),

    #[error("no admissible sample after {0} attempts")]
    RetryExhausted(u32),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
