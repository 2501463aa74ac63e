use std::path::PathBuf;

use crate::improve::ImprovementResult;

/// Errors produced by the solver, the DEA models and the improvement pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimension mismatch: {what} (expected {expected}, got {got})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("point lies outside the production possibility set")]
    OutsidePps,

    #[error("numerical failure after {iterations} simplex iterations: {detail}")]
    Numerical { iterations: usize, detail: String },

    #[error("degenerate placement: {0}")]
    DegeneratePlacement(String),

    #[error("load error at row {row}, column {column}: {message}")]
    Load {
        row: usize,
        column: String,
        message: String,
    },

    #[error("part {part} did not converge; still broken: {}", broken.join(","))]
    Convergence {
        part: u8,
        broken: Vec<String>,
        partial: Option<Box<ImprovementResult>>,
    },

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
