use super::basis::{BasisSet, Degrees, FacetBasisSet};
use super::quadrature::{quadrature_for, QuadratureRule};
use crate::geometry::face_axis;
use crate::{Result, StPoint};

/// Basis values and reference gradients at volume quadrature points.
#[derive(Debug, Clone)]
pub struct VolumeTable {
    pub points: Vec<StPoint>,
    pub weights: Vec<f64>,
    /// `phi[q * n + m]`.
    pub phi: Vec<f64>,
    pub dphi: Vec<StPoint>,
}

/// Tabulation on one local face of the reference element.
#[derive(Debug, Clone)]
pub struct FaceTable {
    pub face: usize,
    pub axis: usize,
    pub side: f64,
    /// Quadrature points in element reference coordinates.
    pub points: Vec<StPoint>,
    /// Reference facet measure weights.
    pub weights: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<StPoint>,
    /// Facet basis values `psi[q * nf + a]` in the unflipped parameterization.
    pub psi: Vec<f64>,
    pub n_facet_modes: usize,
    /// Multiply mode `a` by `flip_signs[a]` when the facet is flipped.
    pub flip_signs: Vec<f64>,
}

impl FaceTable {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Facet basis at point `q`, with orientation applied.
    pub fn psi_at(&self, q: usize, flip: bool, out: &mut [f64]) {
        let row = &self.psi[q * self.n_facet_modes..(q + 1) * self.n_facet_modes];
        for a in 0..self.n_facet_modes {
            out[a] = if flip { row[a] * self.flip_signs[a] } else { row[a] };
        }
    }
}

/// Reference tabulations shared by every element of a given `(degrees, d)`.
#[derive(Debug, Clone)]
pub struct RefTables {
    pub dim: usize,
    pub basis: BasisSet,
    pub vertical: FacetBasisSet,
    pub horizontal: FacetBasisSet,
    pub rule: QuadratureRule,
    pub volume: VolumeTable,
    pub faces: Vec<FaceTable>,
}

impl RefTables {
    pub fn new(degrees: Degrees, dim: usize) -> Result<Self> {
        Self::with_rule(degrees, dim, quadrature_for(degrees.p_t, degrees.p_s))
    }

    pub fn with_rule(degrees: Degrees, dim: usize, rule: QuadratureRule) -> Result<Self> {
        let basis = BasisSet::new(degrees, dim)?;
        let vertical = FacetBasisSet::vertical(degrees, dim);
        let horizontal = FacetBasisSet::horizontal(degrees, dim);
        let nu = basis.len();
        let dd = dim + 1;

        let mut volume = VolumeTable { points: Vec::new(), weights: Vec::new(), phi: Vec::new(), dphi: Vec::new() };
        let mut v = vec![0.0; nu];
        let mut g = vec![[0.0; 3]; nu];
        for (p, w) in rule.tensor(dd) {
            basis.eval(&p, &mut v, &mut g);
            volume.points.push(p);
            volume.weights.push(w);
            volume.phi.extend_from_slice(&v);
            volume.dphi.extend_from_slice(&g);
        }

        let mut faces = Vec::with_capacity(2 * dd);
        for face in 0..2 * dd {
            let (axis, side) = face_axis(face);
            let fb = if axis == 0 { &horizontal } else { &vertical };
            let nf = fb.len();
            let mut t = FaceTable {
                face,
                axis,
                side,
                points: Vec::new(),
                weights: Vec::new(),
                phi: Vec::new(),
                dphi: Vec::new(),
                psi: Vec::new(),
                n_facet_modes: nf,
                flip_signs: fb.flip_signs(),
            };
            let mut psi = vec![0.0; nf];
            for (fp, w) in rule.tensor(dim) {
                let (xi, params) = face_point(dim, axis, side, &fp);
                basis.eval(&xi, &mut v, &mut g);
                fb.eval(&params, &mut psi);
                t.points.push(xi);
                t.weights.push(w);
                t.phi.extend_from_slice(&v);
                t.dphi.extend_from_slice(&g);
                t.psi.extend_from_slice(&psi);
            }
            faces.push(t);
        }
        Ok(RefTables { dim, basis, vertical, horizontal, rule, volume, faces })
    }

    pub fn degrees(&self) -> Degrees {
        self.basis.degrees
    }

    pub fn n_modes(&self) -> usize {
        self.basis.len()
    }

    pub fn facet_basis(&self, face: usize) -> &FacetBasisSet {
        if face < 2 {
            &self.horizontal
        } else {
            &self.vertical
        }
    }
}

/// Maps facet parameters to the element reference point on face
/// `(axis, side)` and returns the facet-basis parameters.
///
/// Vertical faces use `(τ, σ) = (ξ_0, ξ_other)`; horizontal faces use the
/// spatial reference coordinates.
pub(crate) fn face_point(dim: usize, axis: usize, side: f64, fp: &[f64; 3]) -> (StPoint, [f64; 2]) {
    let mut xi = [0.0; 3];
    xi[axis] = side;
    if axis == 0 {
        xi[1..=dim].copy_from_slice(&fp[..dim]);
        (xi, [fp[0], fp[1]])
    } else {
        xi[0] = fp[0];
        if dim == 2 {
            let other = if axis == 1 { 2 } else { 1 };
            xi[other] = fp[1];
        }
        (xi, [fp[0], fp[1]])
    }
}
