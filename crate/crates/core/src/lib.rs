//! Bootstrap percolation with threshold two on a ring (or torus) overlaid
//! with an Erdős–Rényi graph: graph generation, the threshold cascade, the
//! exploration/expansion phase decomposition, closed-form predictions, and a
//! reproducible Monte Carlo harness.

pub mod analytics;
pub mod cascade;
pub mod error;
pub mod graph;
pub mod montecarlo;
pub mod phases;
pub mod reveal;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use graph::{EdgeKind, HybridGraph, Lattice, VertexId};
