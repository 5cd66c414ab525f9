//! Packing unit-rate coded structures next to fractional routing on
//! networks with larger capacities.
//!
//! Throughput is the common rate every session receives. Coded structures
//! are activated in integer copies, each using one unit of capacity on its
//! edges and adding one unit to every session; routing fills the rest.

mod embed;
mod levels;
pub mod lp;
mod model;
mod sim;

pub use embed::{
    enumerate_embeddings, enumerate_embeddings_capped, EmbeddingList, StructureClass,
    StructureEmbedding, EMBEDDING_CAP,
};
pub use levels::{level_template, sample_level_network, CapacityLaw, LevelNetwork, Simulation};
pub use model::{
    improvement, packed_throughput, packed_throughput_with_budget, routing_throughput,
    PackedResult, PackingModel, NODE_BUDGET, PATH_CAP,
};
pub use sim::{
    run_simulation, run_simulation_with, simulate_network, SimulationSummary, TrialRecord,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PackingError {
    #[error("session {session} has more than {cap} paths")]
    TooManyPaths { session: usize, cap: usize },
    #[error("packing needs three sessions, got {0}")]
    SessionCount(usize),
    #[error("level must be 1 to 4, got {0}")]
    Level(u8),
}
