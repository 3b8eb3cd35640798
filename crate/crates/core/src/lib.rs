//! Round-synchronous CONGEST simulation of a deterministic exact weighted
//! all-pairs shortest path algorithm built on a distributed blocker set.
//!
//! The core is generic over the unsigned integer [`Weight`] scalar; the
//! aliases below fix it to `u64`.

pub mod apsp;
pub mod blocker;
pub mod engine;
pub mod error;
pub mod generate;
pub mod graph;
pub mod oracle;
pub mod primitives;
pub mod scalar;

pub use apsp::{default_h, round_budget, run_apsp, ApspConfig, ApspRun, DistanceMatrix};
pub use blocker::{compute_blocker, BlockerSet, ScoreState};
pub use engine::{compose_reports, run_phase, EngineError, Message, Payload, Protocol, RoundReport, Simulator, Tag};
pub use error::{ConfigError, Error, GraphError, Result};
pub use generate::{generate_gnp, GnpSpec};
pub use graph::{parse_graph, parse_graph_with, underlying_undirected, Edge, NodeId, Topology, WeightedDigraph};
pub use scalar::{Distance, Weight};

pub type Graph = WeightedDigraph<u64>;
pub type Dist = Distance<u64>;
pub type Tree = primitives::HopTree<u64>;
pub type Matrix = DistanceMatrix<u64>;
pub type Run = ApspRun<u64>;
