//! Faithful orthogonal representations of graphs built by the uniform
//! Lovász–Saks–Schrijver procedure along greedy vertex orderings, together
//! with the symbolic machinery that certifies them.
//!
//! Vertices, positions and matrix indices are 0-based throughout the API.
//! Text and JSON formats meant for people use 1-based labels.

pub mod enumerate;
pub mod error;
pub mod garden;
pub mod graph;
pub mod greedy;
pub mod io;
pub mod linalg;
pub mod lss;
pub mod ordering;
pub mod props;
pub mod reduction;
pub mod serial;

pub use error::{GardenError, GraphError, LinalgError, LssError, ReductionError};
pub use graph::{Graph, Vertex};
pub use ordering::Ordering;
