use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("series did not converge: {0}")]
    NonConvergence(String),
    #[error("divergent value: {0}")]
    Divergent(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("schema mismatch: {0}")]
    Schema(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
