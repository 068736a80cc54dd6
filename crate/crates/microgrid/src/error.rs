use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {index} has zero impedance")]
    DegenerateLine { index: usize },
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("singular matrix in {0}")]
    Singular(&'static str),
    #[error("riccati solver failed: {0}")]
    Riccati(String),
    #[error("synthesis rejected: {0}")]
    Synthesis(String),
    #[error("non-finite state at t = {t} s")]
    NonFinite { t: f64 },
    #[error("scenario: {0}")]
    Scenario(String),
    #[error("tuning rejected: {0}")]
    Tuning(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
