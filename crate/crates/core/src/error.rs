use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown problem `{id}` (valid: {valid})")]
    UnknownProblem { id: String, valid: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in decision vector at component {index}")]
    NonFiniteInput { index: usize },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("population of {population} is smaller than k = {k}")]
    TooFewPoints { population: usize, k: usize },

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("config error: {0}")]
    ConfigValue(String),

    #[error("malformed front file {path}: {message}")]
    FrontFile { path: PathBuf, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by the user's configuration, as opposed to failures
    /// while running. The CLI maps these to exit status 2.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config { .. }
                | Error::ConfigValue(_)
                | Error::InvalidParams(_)
                | Error::UnknownProblem { .. }
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
