//! Dependency-network analysis for formal-mathematics libraries.
//!
//! The library ingests exported dependency data (module import tables,
//! declaration premise tables, build weights, PR co-modification records)
//! and computes structural analyses over the resulting multi-layer graphs:
//! transitive reduction and redundancy, build critical paths, namespace
//! aggregations, centrality, community detection, heavy-tailed degree
//! fitting, robustness under node removal, and cross-layer boundary
//! metrics.

pub mod aggregation;
pub mod centrality;
pub mod community;
pub mod components;
pub mod decomp;
pub mod evolution;
pub mod graph;
pub mod ingest;
pub mod layering;
pub mod module_analysis;
pub mod name;
pub mod partition;
pub mod robustness;
pub mod tail_fit;

pub use graph::{
    DeclKind, DepGraph, DefHeight, EdgeOrigin, EdgeRecord, GraphError, NodeId, NodeRecord,
    Tristate, Visibility,
};
pub use name::DottedName;
pub use partition::{Grouping, Partition};
