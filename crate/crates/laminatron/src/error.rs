use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("curves live on different surfaces ({0} vs {1} punctures)")]
    SurfaceMismatch(usize, usize),
    #[error("not a simple closed curve: {0}")]
    NotSimple(String),
    #[error("realization failed: {0}")]
    RealizationFailed(String),
    #[error("non-unimodal profile: {0}")]
    NonUnimodal(String),
    #[error("twist acceleration did not certify within {0} steps")]
    AccelerationFailed(usize),
    #[error("word length {len} exceeds budget {cap}")]
    WordBudget { len: usize, cap: usize },
    #[error("rotation needs a frame built from pentagon twists only")]
    NotPentagonPure,
    #[error("insufficient prefix: {0}")]
    InsufficientPrefix(String),
    #[error("time {0} lies outside the sampled window")]
    OutOfWindow(f64),
    #[error("ill-conditioned basis: residual {0}")]
    IllConditioned(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
