use std::path::PathBuf;

use thiserror::Error;

use crate::fuzzy::FuzzyError;
use crate::linalg::LinalgError;
use crate::optim::OptimError;
use crate::pipeline::FfemuResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
    #[error(transparent)]
    Optim(#[from] OptimError),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid model: {0}")]
    Model(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("sampler diagnostics: {0}")]
    Diagnostics(String),
    #[error("alpha level {level} (index {index}) failed: {source}")]
    Level {
        index: usize,
        level: f64,
        source: Box<Error>,
        /// Levels completed before the failure.
        partial: Box<FfemuResult>,
    },
    #[error("{}: {source}", path.display())]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn shape(what: &str, expected: usize, found: usize) -> Self {
        Error::Shape(format!("{what}: expected length {expected}, found {found}"))
    }
}
