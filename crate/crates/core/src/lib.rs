//! Enumeration of delay-bounded functional topologies for in-network
//! computation of divisible functions.
//!
//! A functional topology is a Steiner in-tree of a physical network that
//! connects every input node to a sink. This crate lists all of them for a
//! query ([`find_fts`]), computes their degeneracy and redundancy
//! ([`metrics`]), checks everything against brute-force references
//! ([`oracle`], [`verify`]) and measures, by simulation, how much keeping
//! alternatives around helps when relays and links fail ([`sim`]).

pub mod enumeration;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod oracle;
pub mod sim;
pub mod subgraph;
pub mod verify;

pub use enumeration::{
    find_fts, find_fts_with, EnumerationError, EnumerationOptions, FtCatalog, Provenance,
};
pub use graph::{
    CanonicalFtKey, FtError, FunctionalTopology, GraphError, NodeId, PhysicalNetwork, QuerySpec,
};
pub use metrics::{bell_number, DegeneracyReport, FunctionSpec, RedundancyReport};
pub use sim::{FailureModel, SimulationReport, Strategy, StrategyKind};
pub use subgraph::Subgraph;

/// Crate version, embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
