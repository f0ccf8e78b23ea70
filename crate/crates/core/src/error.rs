use thiserror::Error;

/// Errors produced by the detection toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: expected two node identifiers, found {found}")]
    Parse { line: usize, found: usize },

    #[error("node index {index} out of range for graph with {n} nodes")]
    OutOfBounds { index: usize, n: usize },

    #[error("dimension mismatch: expected length {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("criterion undefined: node set has zero total degree")]
    UndefinedCriterion,

    #[error("node {0} has zero degree and cannot carry a membership weight")]
    ZeroDegree(usize),

    #[error("degenerate thresholding input: nothing survives")]
    Degenerate,

    #[error("graph has no edges")]
    NoEdges,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
