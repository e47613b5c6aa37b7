//! Boundary-tagged triangulations of radial-graph domains.

mod generate;
mod mesh;
mod refine;

pub use generate::{rectangle, triangulate};
pub use mesh::{BoundaryEdge, BoundaryTag, MeshEdge, TaggedMesh};
pub use refine::refine;
