//! Space-time slabs, elements and facets built from a deforming spatial mesh.

mod deform;
mod element;
mod mesh;
mod slab;
pub mod vtk;

pub use deform::{Deformation, Identity, PulseDeformation};
pub use element::{ElementGeometry, Mapping};
pub use mesh::{BoundaryFace, BoundaryTag, MeshTopology, SpatialFace, SpatialMesh};
pub use slab::{build_slab, mesh_metrics, ElementMetrics, Facet, FacetKind, FacetSide, SlabBuilder, SpaceTimeSlab};

/// Local face numbering on the reference element `(-1, 1)^{d+1}`:
/// face 0 is the bottom (`ξ_0 = -1`, time level `t_n`), face 1 the top
/// (`ξ_0 = +1`), and faces `2k`, `2k + 1` the vertical faces `ξ_k = -1`,
/// `ξ_k = +1` for spatial direction `k = 1..=d`.
pub const BOTTOM: usize = 0;
pub const TOP: usize = 1;

/// Reference axis and side (`-1.0` or `+1.0`) of a local face.
pub fn face_axis(face: usize) -> (usize, f64) {
    (face / 2, if face.is_multiple_of(2) { -1.0 } else { 1.0 })
}

pub fn is_vertical(face: usize) -> bool {
    face >= 2
}
