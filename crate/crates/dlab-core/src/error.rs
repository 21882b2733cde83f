use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("unexpected end of data: {0}")]
    UnexpectedEof(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("grid budget exceeded: {0}")]
    Budget(String),
    #[error("divergent norm: {0}")]
    Divergent(String),
    #[error("solver aborted at t = {t}: {reason}")]
    SolverAbort { t: f64, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
