use thiserror::Error;

use crate::walk::Harvest;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// The queried Kikuchi vertex has degree zero.
    #[error("vertex {0:?} has no neighbors")]
    NoNeighbor(Vec<u32>),

    #[error("hypergraph has no edges")]
    NoEdges,

    #[error("walk aborted at step {step}: vertex {vertex:?} is isolated")]
    WalkAborted { step: usize, vertex: Vec<u32> },

    #[error("distribution undefined: {0}")]
    UndefinedDistribution(String),

    #[error("found {found} of {target} distinct even covers")]
    InsufficientCovers {
        found: usize,
        target: usize,
        partial: Box<Harvest>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
