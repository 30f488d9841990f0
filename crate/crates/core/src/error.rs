use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("universe mismatch: {left} vs {right}")]
    UniverseMismatch { left: usize, right: usize },
    #[error("value {value} outside the declared bound [-{bound}, {bound}]")]
    ValueOutOfBound { value: i64, bound: i64 },
    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),
    #[error("certificate extraction failed after {0} attempts")]
    ExtractionFailed(usize),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
