use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver did not converge: {0}")]
    NonConvergence(String),
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("degenerate weight: {0}")]
    DegenerateWeight(String),
    #[error("tied atoms at {0} (exact formula needs distinct values)")]
    Tie(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
