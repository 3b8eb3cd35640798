use thiserror::Error;

use crate::engine::EngineError;
use crate::graph::NodeId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {line}: malformed header: {reason}")]
    Header { line: usize, reason: String },
    #[error("line {line}: malformed edge: {reason}")]
    Edge { line: usize, reason: String },
    #[error("header declares {declared} edges but {found} were given")]
    EdgeCount { declared: usize, found: usize },
    #[error("edge ({u}, {v}): node id out of range 1..={n}")]
    NodeOutOfRange { u: NodeId, v: NodeId, n: usize },
    #[error("edge ({u}, {u}): self-loops are not allowed")]
    SelfLoop { u: NodeId },
    #[error("edge ({u}, {v}): non-positive weight")]
    NonPositiveWeight { u: NodeId, v: NodeId },
    #[error("edge ({u}, {v}): weight {w} exceeds W_max = {w_max}")]
    WeightTooLarge { u: NodeId, v: NodeId, w: String, w_max: String },
    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: NodeId, v: NodeId },
    #[error("underlying undirected graph is disconnected: node {unreached} unreachable from node 1")]
    Disconnected { unreached: NodeId },
    #[error("graph needs at least one node")]
    Empty,
    #[error("n * W_max does not fit the weight type")]
    WeightRange,
    #[error("generator produced a disconnected graph after {attempts} attempts (seed {seed})")]
    GeneratorDisconnected { seed: u64, attempts: usize },
    #[error("invalid generator parameter: {0}")]
    GeneratorParam(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("hop bound h = {h} outside 1..={max} for n = {n}")]
    HopBound { h: usize, n: usize, max: usize },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
