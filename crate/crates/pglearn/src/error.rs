//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("degenerate graph: {0}")]
    DegenerateGraph(String),
    #[error("invalid weight at ({i}, {j}): {value}")]
    InvalidWeight { i: usize, j: usize, value: f64 },
    #[error("mode {mode} out of range for order-{order} tensor")]
    ModeOutOfRange { mode: usize, order: usize },
    #[error("empty signal set")]
    EmptySignalSet,
    #[error("dense product of {nodes} nodes exceeds cap {cap}; use the implicit apply path")]
    DenseCapExceeded { nodes: usize, cap: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("non-finite value encountered in {0}")]
    NonFinite(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("infeasible generator spec: {0}")]
    InfeasibleSpec(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: parse error at line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
