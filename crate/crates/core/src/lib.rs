//! Exact GKM-graph equivariant cohomology for complex quadrics and circle
//! actions on CP¹.

pub mod error;
pub mod lattice;
pub mod poly;

pub use error::{Error, Result};
pub mod cli;
pub mod cohomology;
pub mod cp1;
pub mod decomposition;
pub mod generators;
pub mod graph;
pub mod ordinary;
pub mod relations;
