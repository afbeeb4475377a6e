use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("self-loop on node {0} is not allowed")]
    SelfLoop(usize),
    #[error("node index {index} out of range for graph with {node_count} nodes")]
    InvalidNode { index: usize, node_count: usize },
    #[error("requested {requested} items but only {available} are available")]
    Capacity { requested: usize, available: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("graph has {node_count} nodes but {other} was expected")]
    NodeCountMismatch { node_count: usize, other: usize },
    #[error("model fitting impossible: {0}")]
    Degenerate(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
