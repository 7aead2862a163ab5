use super::deform::Deformation;
use super::element::ElementGeometry;
use super::mesh::{BoundaryTag, MeshTopology, SpatialMesh, QUAD_CORNER_TO_CCW};
use super::{BOTTOM, TOP};
use crate::spaces::gauss_legendre;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FacetKind {
    VerticalInterior,
    VerticalBoundary(BoundaryTag),
    /// Element face at `t_n`; carries inflow trace data.
    Bottom,
    /// Element face at `t_{n+1}`.
    Top,
}

impl FacetKind {
    pub fn is_vertical(self) -> bool {
        matches!(self, FacetKind::VerticalInterior | FacetKind::VerticalBoundary(_))
    }
}

/// One element's view of a facet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FacetSide {
    pub element: usize,
    pub face: usize,
    /// The element's tangential face coordinate runs against the facet's.
    pub flip: bool,
}

#[derive(Debug, Clone)]
pub struct Facet {
    pub kind: FacetKind,
    /// Adjacent elements, owner (lowest element id) first.
    pub sides: Vec<FacetSide>,
    /// Position among the vertical facets that carry unknowns (all vertical
    /// facets except Dirichlet ones).
    pub slot: Option<usize>,
}

/// The elements and facets of one time slab `(t_n, t_{n+1})`.
///
/// Facets are numbered vertical first (in spatial face order), then one
/// bottom facet per cell, then one top facet per cell. Element `e` is the
/// space-time extrusion of spatial cell `e`.
#[derive(Debug, Clone)]
pub struct SpaceTimeSlab {
    pub index: usize,
    pub dim: usize,
    pub t0: f64,
    pub t1: f64,
    pub elements: Vec<ElementGeometry>,
    pub facets: Vec<Facet>,
    /// Facet id of each local face, `element_facets[e][face]`.
    pub element_facets: Vec<[usize; 6]>,
    pub element_flips: Vec<[bool; 6]>,
    pub n_vertical: usize,
    pub n_slots: usize,
}

impl SpaceTimeSlab {
    pub fn dt(&self) -> f64 {
        self.t1 - self.t0
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn n_faces_per_element(&self) -> usize {
        2 * (self.dim + 1)
    }

    pub fn bottom_facet(&self, element: usize) -> usize {
        self.n_vertical + element
    }

    pub fn top_facet(&self, element: usize) -> usize {
        self.n_vertical + self.elements.len() + element
    }

    pub fn facet_of(&self, element: usize, face: usize) -> (&Facet, bool) {
        (&self.facets[self.element_facets[element][face]], self.element_flips[element][face])
    }
}

/// Builds slabs of a fixed spatial mesh under a deformation map.
pub struct SlabBuilder<'a> {
    mesh: &'a SpatialMesh,
    topology: MeshTopology,
    deform: &'a dyn Deformation,
}

impl<'a> SlabBuilder<'a> {
    pub fn new(mesh: &'a SpatialMesh, deform: &'a dyn Deformation) -> Result<Self> {
        Ok(SlabBuilder { mesh, topology: mesh.topology()?, deform })
    }

    pub fn mesh(&self) -> &SpatialMesh {
        self.mesh
    }

    pub fn topology(&self) -> &MeshTopology {
        &self.topology
    }

    /// Deformed positions of all mesh vertices at time `t`.
    pub fn positions(&self, t: f64) -> Vec<[f64; 2]> {
        self.mesh.vertices.iter().map(|&x0| self.deform.apply(t, x0)).collect()
    }

    /// Builds slab `index` spanning `(t0, t1)`. Callers marching in time
    /// should pass the same `t1` value as the next slab's `t0` so the
    /// shared time level is evaluated identically.
    pub fn build(&self, index: usize, t0: f64, t1: f64) -> Result<SpaceTimeSlab> {
        if !(t1 > t0) {
            return Err(Error::config("dt", format!("time step must be positive, got {}", t1 - t0)));
        }
        let mesh = self.mesh;
        let dim = mesh.dim;
        let nc = mesh.cells.len();
        let corners = 1 << dim;
        let bottom = self.positions(t0);
        let top = self.positions(t1);

        let elements: Vec<ElementGeometry> = (0..nc)
            .map(|c| {
                let cell = &mesh.cells[c];
                let pick = |pos: &[[f64; 2]]| -> Vec<[f64; 2]> {
                    (0..corners)
                        .map(|k| if dim == 2 { pos[cell[QUAD_CORNER_TO_CCW[k]]] } else { pos[cell[k]] })
                        .collect()
                };
                ElementGeometry { id: c, ..ElementGeometry::new(dim, t0, t1, &pick(&bottom), &pick(&top)) }
            })
            .collect();
        check_jacobians(&elements)?;

        let nfaces = 2 * (dim + 1);
        let n_vertical = self.topology.faces.len();
        let mut facets = Vec::with_capacity(n_vertical + 2 * nc);
        let mut element_facets = vec![[usize::MAX; 6]; nc];
        let mut element_flips = vec![[false; 6]; nc];
        let mut n_slots = 0;
        for (fi, sf) in self.topology.faces.iter().enumerate() {
            let kind = match sf.tag {
                None => FacetKind::VerticalInterior,
                Some(t) => FacetKind::VerticalBoundary(t),
            };
            let sides = sf
                .cells
                .iter()
                .map(|&(c, lf)| {
                    let [a, b] = mesh.local_face_vertices(c, lf);
                    let flip = dim == 2 && a > b;
                    element_facets[c][2 + lf] = fi;
                    element_flips[c][2 + lf] = flip;
                    FacetSide { element: c, face: 2 + lf, flip }
                })
                .collect();
            let slot = if kind == FacetKind::VerticalBoundary(BoundaryTag::Dirichlet) {
                None
            } else {
                n_slots += 1;
                Some(n_slots - 1)
            };
            facets.push(Facet { kind, sides, slot });
        }
        for (kind, face) in [(FacetKind::Bottom, BOTTOM), (FacetKind::Top, TOP)] {
            for c in 0..nc {
                element_facets[c][face] = facets.len();
                facets.push(Facet { kind, sides: vec![FacetSide { element: c, face, flip: false }], slot: None });
            }
        }
        debug_assert!(element_facets.iter().all(|f| f[..nfaces].iter().all(|&x| x != usize::MAX)));

        Ok(SpaceTimeSlab { index, dim, t0, t1, elements, facets, element_facets, element_flips, n_vertical, n_slots })
    }
}

/// Convenience wrapper building a single slab on `(t_n, t_n + Δt)`.
pub fn build_slab(mesh: &SpatialMesh, deform: &dyn Deformation, t_n: f64, dt: f64) -> Result<SpaceTimeSlab> {
    SlabBuilder::new(mesh, deform)?.build(0, t_n, t_n + dt)
}

/// Check rule: 5 Gauss points per direction.
const CHECK_POINTS: usize = 5;

fn check_jacobians(elements: &[ElementGeometry]) -> Result<()> {
    let rule = gauss_legendre(CHECK_POINTS);
    for (e, el) in elements.iter().enumerate() {
        for (q, (xi, _)) in rule.tensor(el.dim + 1).iter().enumerate() {
            let det = el.map(xi).det;
            if !(det > 0.0) {
                return Err(Error::NonPositiveJacobian { element: e, point: q, det });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementMetrics {
    pub h: f64,
    pub rho: f64,
    pub ratio: f64,
    pub min_det: f64,
    pub max_det: f64,
}

/// Per-element size and shape-regularity data. `min_det`/`max_det` are the
/// extreme Jacobian determinants of the full element map, normalized by the
/// brick volume scaling `Δt ∏ h_i / 2^{d+1}`, so they bound the determinant of
/// the shape diffeomorphism alone.
pub fn mesh_metrics(slab: &SpaceTimeSlab) -> Vec<ElementMetrics> {
    let rule = gauss_legendre(CHECK_POINTS);
    slab.elements
        .iter()
        .map(|el| {
            let scale = el.brick_volume() / f64::from(1u32 << (el.dim + 1));
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for (xi, _) in rule.tensor(el.dim + 1) {
                let d = el.map(&xi).det / scale;
                lo = lo.min(d);
                hi = hi.max(d);
            }
            ElementMetrics { h: el.h, rho: el.rho, ratio: el.h / el.rho, min_det: lo, max_det: hi }
        })
        .collect()
}
