//! Boundary path spaces, graph groupoids and orbit equivalence for finite
//! directed graphs whose vertices may emit infinitely many edges.

pub mod boundary;
pub mod dsl;
pub mod dynamics;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod groupoid;
pub mod invariants;
pub mod json;
pub mod moves;
pub mod text;
pub mod weyl;

pub use boundary::{BoundaryPoint, Census, Cylinder};
pub use error::{Error, Result};
pub use graph::{ClassId, Edge, EdgeClass, Graph, Loop, Multiplicity, Path, VertexId, VertexKind};
