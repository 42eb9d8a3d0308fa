use std::path::PathBuf;

use crate::topo_map::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed map file: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no edge between {0} and {1}")]
    MissingEdge(NodeId, NodeId),

    #[error("unknown node {0}")]
    UnknownNode(NodeId),

    #[error("node {to} is unreachable from {from}")]
    Unreachable { from: NodeId, to: NodeId },

    #[error("observation must be positive and finite, got {0}")]
    BadObservation(f64),

    #[error("negative initial variance {0}")]
    NegativeVariance(f64),

    #[error("history length {got} does not match regression order {expected}")]
    HistoryLength { expected: usize, got: usize },

    #[error("observation table exhausted for edge {from}-{to} at index {k}")]
    TableExhausted { from: NodeId, to: NodeId, k: usize },

    #[error("path is not a chain of map edges at position {0}")]
    BrokenPath(usize),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
