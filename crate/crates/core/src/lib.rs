//! Linear network codes for three-session multiple unicast on DAGs.

pub mod coding;
pub mod construction;
pub mod counterexample;
pub mod field;
pub mod graph;
pub mod instance;
pub mod packing;
pub mod verify;
