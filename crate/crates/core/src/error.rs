use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("outside the valid domain: {0}")]
    Domain(String),
    #[error("eigensolver failure: {0}")]
    Eigen(String),
    #[error("insufficient resolution: {0}")]
    Resolution(String),
    #[error("assembly check failed: {0}")]
    Assembly(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
