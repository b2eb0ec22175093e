use std::io;
use std::path::PathBuf;

use crate::lasso::LassoError;
use crate::prosody::{MeasureError, StatsError};
use crate::score::ScoreError;
use crate::stimuli::StimulusError;
use crate::syntax::{ConlluError, FeatureError, TreeError};
use crate::textgrid::{MatchError, TextGridError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Crate-level error. Module errors convert into it with `?`.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Stimulus(#[from] StimulusError),
    #[error(transparent)]
    TextGrid(#[from] TextGridError),
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error(transparent)]
    Conllu(#[from] ConlluError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error(transparent)]
    Lasso(#[from] LassoError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Usage(String),
    /// Input that was read fine but does not have the expected shape
    /// (bad JSON line, missing CSV column, ...).
    #[error("{context}: {message}")]
    Schema { context: String, message: String },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn schema(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema { context: context.into(), message: message.into() }
    }

    /// Process exit code: 2 for usage and I/O problems, 1 for everything
    /// that went wrong during analysis.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Usage(_) => 2,
            _ => 1,
        }
    }
}
