use crate::network::VertexId;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("negative capacity on edge ({u}, {v})")]
    NegativeCapacity { u: VertexId, v: VertexId },
    #[error("duplicate terminal {0}")]
    DuplicateTerminal(VertexId),
    #[error("terminal mismatch: {0}")]
    TerminalMismatch(String),
    #[error("edge ({u}, {v}) joins two non-terminals")]
    NotQuasiBipartite { u: VertexId, v: VertexId },
    #[error("edge ({u}, {v}) has no endpoint in the cover")]
    NotVertexCover { u: VertexId, v: VertexId },
    #[error("component of size {size} exceeds bound {bound}")]
    ComponentTooLarge { size: usize, bound: usize },
    #[error("invalid separator: {0}")]
    InvalidSeparator(String),
    #[error("invalid demand: {0}")]
    InvalidDemand(String),
    #[error("stars disagree on capacity comparisons: {0}")]
    SignatureMismatch(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{0} (pass force=true to override)")]
    GuardrailExceeded(String),
    #[error("problem too large for the exact solver: {0}")]
    TooLarge(String),
    #[error("invalid tree decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("inconsistent instance parameters: {0}")]
    InvalidSpec(String),
    #[error("graphs share non-terminal vertex {0}")]
    SharedSteiner(VertexId),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
