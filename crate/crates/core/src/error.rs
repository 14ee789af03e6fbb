use std::path::PathBuf;

use thiserror::Error;

use crate::graph::NodeId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed edge input: duplicate edges or self-loops.
    #[error("structural input error: {0}")]
    Structural(String),

    #[error("node {node} out of bounds (graph has {node_count} nodes)")]
    NodeOutOfBounds { node: NodeId, node_count: usize },

    #[error("node {node} is not covered by the partition")]
    PartitionCoverage { node: NodeId },

    #[error("ratio undefined: {0}")]
    UndefinedRatio(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("generation failed: {0}")]
    GenerationFailure(String),

    #[error("capacity error: {0}")]
    Capacity(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
