use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, MatMut, Par};

use super::problem::Problem;
use crate::geometry::{is_vertical, ElementGeometry, FacetKind, SpaceTimeSlab};
use crate::spaces::RefTables;
use crate::StPoint;

/// Which local faces of an element lie on the Neumann/inflow boundary `∂E_N`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FaceRoles {
    pub neumann: [bool; 6],
}

impl FaceRoles {
    /// Roles of element `e`: vertical Neumann facets always, the bottom and
    /// top faces as requested.
    pub fn in_slab(slab: &SpaceTimeSlab, e: usize, bottom: bool, top: bool) -> Self {
        let mut neumann = [false; 6];
        for (face, flag) in neumann.iter_mut().enumerate().take(slab.n_faces_per_element()) {
            *flag = match slab.facet_of(e, face).0.kind {
                FacetKind::VerticalBoundary(tag) => tag == crate::geometry::BoundaryTag::Neumann,
                FacetKind::VerticalInterior => false,
                FacetKind::Bottom => bottom,
                FacetKind::Top => top,
            };
        }
        FaceRoles { neumann }
    }
}

/// Coupling blocks between the element unknowns and one face's trace
/// unknowns. Rows index test functions, columns trial functions.
#[derive(Debug, Clone)]
pub struct FaceBlocks {
    pub a_ul: Mat<f64>,
    pub a_lu: Mat<f64>,
    pub a_ll: Mat<f64>,
    pub b_l: Vec<f64>,
}

/// Element-local contribution to the global system.
#[derive(Debug, Clone)]
pub struct LocalSystem {
    pub a_uu: Mat<f64>,
    pub b_u: Vec<f64>,
    pub faces: Vec<FaceBlocks>,
}

impl LocalSystem {
    pub fn zeros(nu: usize, facet_modes: &[usize]) -> Self {
        LocalSystem {
            a_uu: Mat::zeros(nu, nu),
            b_u: vec![0.0; nu],
            faces: facet_modes
                .iter()
                .map(|&nf| FaceBlocks {
                    a_ul: Mat::zeros(nu, nf),
                    a_lu: Mat::zeros(nf, nu),
                    a_ll: Mat::zeros(nf, nf),
                    b_l: vec![0.0; nf],
                })
                .collect(),
        }
    }

    pub fn add(&mut self, other: &LocalSystem) {
        self.a_uu += &other.a_uu;
        for (a, b) in self.b_u.iter_mut().zip(&other.b_u) {
            *a += b;
        }
        for (f, g) in self.faces.iter_mut().zip(&other.faces) {
            f.a_ul += &g.a_ul;
            f.a_lu += &g.a_lu;
            f.a_ll += &g.a_ll;
            for (a, b) in f.b_l.iter_mut().zip(&g.b_l) {
                *a += b;
            }
        }
    }
}

/// Fallback interior-penalty parameter when no measured trace constant is available.
pub fn default_penalty(p_s: usize) -> f64 {
    4.0 * ((p_s + 1) * (p_s + 1)) as f64
}

pub(crate) struct FaceData {
    pub phi: Mat<f64>,
    pub psi: Mat<f64>,
    /// Physical normal derivative `∇̄φ · n̄`.
    pub gn: Mat<f64>,
    pub w: Vec<f64>,
    pub bn: Vec<f64>,
    pub points: Vec<StPoint>,
    pub normals: Vec<StPoint>,
}

/// Basis data at the physical quadrature points of one element.
pub(crate) struct ElementData {
    pub phi: Mat<f64>,
    /// `β · ∇φ`.
    pub bgrad: Mat<f64>,
    /// Physical time derivatives.
    pub dt: Mat<f64>,
    /// Spatial physical gradients, one matrix per direction.
    pub grads: Vec<Mat<f64>>,
    pub w: Vec<f64>,
    pub points: Vec<StPoint>,
    pub faces: Vec<FaceData>,
}

impl ElementData {
    pub fn new(elem: &ElementGeometry, flips: &[bool; 6], problem: &dyn Problem, tables: &RefTables) -> Self {
        let dim = elem.dim;
        let dd = dim + 1;
        let nu = tables.n_modes();
        let vol = &tables.volume;
        let nq = vol.points.len();
        let mut phi = Mat::zeros(nq, nu);
        let mut bgrad = Mat::zeros(nq, nu);
        let mut dt = Mat::zeros(nq, nu);
        let mut grads = vec![Mat::zeros(nq, nu); dim];
        let mut w = Vec::with_capacity(nq);
        let mut points = Vec::with_capacity(nq);
        for (q, xi) in vol.points.iter().enumerate() {
            let map = elem.map(xi);
            let beta = problem.st_velocity(&map.point);
            w.push(vol.weights[q] * map.det);
            points.push(map.point);
            for i in 0..nu {
                let g = map.gradient(&vol.dphi[q * nu + i], dd);
                phi[(q, i)] = vol.phi[q * nu + i];
                bgrad[(q, i)] = (0..dd).map(|k| beta[k] * g[k]).sum();
                dt[(q, i)] = g[0];
                for k in 0..dim {
                    grads[k][(q, i)] = g[k + 1];
                }
            }
        }

        let faces = (0..2 * dd)
            .map(|face| {
                let ft = &tables.faces[face];
                let nf = ft.n_facet_modes;
                let nq = ft.len();
                let mut d = FaceData {
                    phi: Mat::zeros(nq, nu),
                    psi: Mat::zeros(nq, nf),
                    gn: Mat::zeros(nq, nu),
                    w: Vec::with_capacity(nq),
                    bn: Vec::with_capacity(nq),
                    points: Vec::with_capacity(nq),
                    normals: Vec::with_capacity(nq),
                };
                let mut psi = vec![0.0; nf];
                for (q, xi) in ft.points.iter().enumerate() {
                    let map = elem.map(xi);
                    let (mut n, ds) = map.face_normal(ft.axis, ft.side, dd);
                    if !is_vertical(face) {
                        n = [ft.side, 0.0, 0.0];
                    }
                    let beta = problem.st_velocity(&map.point);
                    d.bn.push((0..dd).map(|k| beta[k] * n[k]).sum());
                    d.w.push(ft.weights[q] * ds);
                    d.points.push(map.point);
                    d.normals.push(n);
                    ft.psi_at(q, flips[face], &mut psi);
                    for (a, &v) in psi.iter().enumerate() {
                        d.psi[(q, a)] = v;
                    }
                    for i in 0..nu {
                        d.phi[(q, i)] = ft.phi[q * nu + i];
                        let g = map.gradient(&ft.dphi[q * nu + i], dd);
                        d.gn[(q, i)] = (1..dd).map(|k| g[k] * n[k]).sum();
                    }
                }
                d
            })
            .collect();
        ElementData { phi, bgrad, dt, grads, w, points, faces }
    }
}

/// `dst += alpha · Σ_q w_q left[q, i] right[q, j]`.
pub(crate) fn gram(dst: MatMut<'_, f64>, left: &Mat<f64>, right: &Mat<f64>, w: &[f64], alpha: f64) {
    let scaled = Mat::from_fn(right.nrows(), right.ncols(), |q, j| w[q] * right[(q, j)]);
    matmul(dst, Accum::Add, left.transpose(), scaled.as_ref(), alpha, Par::Seq);
}

pub(crate) fn weighted(w: &[f64], f: impl Fn(usize) -> f64) -> Vec<f64> {
    w.iter().enumerate().map(|(q, &wq)| wq * f(q)).collect()
}

fn empty_system(tables: &RefTables) -> LocalSystem {
    let modes: Vec<usize> = tables.faces.iter().map(|f| f.n_facet_modes).collect();
    LocalSystem::zeros(tables.n_modes(), &modes)
}

fn advective(data: &ElementData, roles: &FaceRoles, tables: &RefTables) -> LocalSystem {
    let mut sys = empty_system(tables);
    gram(sys.a_uu.as_mut(), &data.bgrad, &data.phi, &data.w, -1.0);
    for (face, (fd, blocks)) in data.faces.iter().zip(sys.faces.iter_mut()).enumerate() {
        let plus = weighted(&fd.w, |q| 0.5 * (fd.bn[q] + fd.bn[q].abs()));
        let minus = weighted(&fd.w, |q| 0.5 * (fd.bn[q] - fd.bn[q].abs()));
        gram(sys.a_uu.as_mut(), &fd.phi, &fd.phi, &plus, 1.0);
        gram(blocks.a_ul.as_mut(), &fd.phi, &fd.psi, &minus, 1.0);
        gram(blocks.a_lu.as_mut(), &fd.psi, &fd.phi, &plus, -1.0);
        gram(blocks.a_ll.as_mut(), &fd.psi, &fd.psi, &minus, -1.0);
        if roles.neumann[face] {
            gram(blocks.a_ll.as_mut(), &fd.psi, &fd.psi, &plus, 1.0);
        }
    }
    sys
}

fn diffusive(data: &ElementData, elem: &ElementGeometry, nu: f64, alpha: f64, tables: &RefTables) -> LocalSystem {
    let mut sys = empty_system(tables);
    if nu == 0.0 {
        return sys;
    }
    for g in &data.grads {
        gram(sys.a_uu.as_mut(), g, g, &data.w, nu);
    }
    let pen = nu * alpha / elem.h;
    for (face, (fd, blocks)) in data.faces.iter().zip(sys.faces.iter_mut()).enumerate() {
        if !is_vertical(face) {
            continue;
        }
        gram(sys.a_uu.as_mut(), &fd.phi, &fd.phi, &fd.w, pen);
        gram(sys.a_uu.as_mut(), &fd.gn, &fd.phi, &fd.w, -nu);
        gram(sys.a_uu.as_mut(), &fd.phi, &fd.gn, &fd.w, -nu);
        gram(blocks.a_ul.as_mut(), &fd.phi, &fd.psi, &fd.w, -pen);
        gram(blocks.a_ul.as_mut(), &fd.gn, &fd.psi, &fd.w, nu);
        gram(blocks.a_lu.as_mut(), &fd.psi, &fd.phi, &fd.w, -pen);
        gram(blocks.a_lu.as_mut(), &fd.psi, &fd.gn, &fd.w, nu);
        gram(blocks.a_ll.as_mut(), &fd.psi, &fd.psi, &fd.w, pen);
    }
    sys
}

fn rhs(data: &ElementData, roles: &FaceRoles, problem: &dyn Problem, tables: &RefTables) -> LocalSystem {
    let mut sys = empty_system(tables);
    let nu = tables.n_modes();
    for (q, z) in data.points.iter().enumerate() {
        let f = problem.source(z);
        if f != 0.0 {
            for i in 0..nu {
                sys.b_u[i] += data.w[q] * f * data.phi[(q, i)];
            }
        }
    }
    for (face, (fd, blocks)) in data.faces.iter().zip(sys.faces.iter_mut()).enumerate() {
        if !roles.neumann[face] {
            continue;
        }
        for q in 0..fd.w.len() {
            let g = fd.w[q] * problem.boundary_data(&fd.points[q], &fd.normals[q]);
            for (a, b) in blocks.b_l.iter_mut().enumerate() {
                *b += g * fd.psi[(q, a)];
            }
        }
    }
    sys
}

/// Advective part of the element contribution.
pub fn assemble_advective(
    elem: &ElementGeometry,
    flips: &[bool; 6],
    roles: &FaceRoles,
    problem: &dyn Problem,
    tables: &RefTables,
) -> LocalSystem {
    advective(&ElementData::new(elem, flips, problem, tables), roles, tables)
}

/// Diffusive part (symmetric interior penalty on vertical faces).
pub fn assemble_diffusive(
    elem: &ElementGeometry,
    flips: &[bool; 6],
    alpha: f64,
    problem: &dyn Problem,
    tables: &RefTables,
) -> LocalSystem {
    let data = ElementData::new(elem, flips, problem, tables);
    diffusive(&data, elem, problem.diffusion(), alpha, tables)
}

/// Source and boundary-data contributions.
pub fn assemble_rhs(
    elem: &ElementGeometry,
    flips: &[bool; 6],
    roles: &FaceRoles,
    problem: &dyn Problem,
    tables: &RefTables,
) -> LocalSystem {
    rhs(&ElementData::new(elem, flips, problem, tables), roles, problem, tables)
}

/// Full element contribution: advective + diffusive operators and right-hand side.
pub fn assemble_local(
    elem: &ElementGeometry,
    flips: &[bool; 6],
    roles: &FaceRoles,
    alpha: f64,
    problem: &dyn Problem,
    tables: &RefTables,
) -> LocalSystem {
    let data = ElementData::new(elem, flips, problem, tables);
    let mut sys = advective(&data, roles, tables);
    sys.add(&diffusive(&data, elem, problem.diffusion(), alpha, tables));
    let r = rhs(&data, roles, problem, tables);
    sys.b_u = r.b_u;
    for (f, g) in sys.faces.iter_mut().zip(r.faces) {
        f.b_l = g.b_l;
    }
    sys
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::ProblemSpec;
    use crate::geometry::{build_slab, BoundaryTag, PulseDeformation, SpatialMesh};
    use crate::spaces::{project_facet, Degrees};

    fn slab() -> SpaceTimeSlab {
        let m = SpatialMesh::uniform_grid(3, 3, [-0.5, -0.5], [0.5, 0.5], |_| BoundaryTag::Neumann);
        build_slab(&m, &PulseDeformation::new(0.1), 0.1, 0.2).unwrap()
    }

    fn full_matrix(sys: &LocalSystem) -> Mat<f64> {
        let nu = sys.a_uu.nrows();
        let n = nu + sys.faces.iter().map(|f| f.a_ll.nrows()).sum::<usize>();
        let mut a = Mat::zeros(n, n);
        a.as_mut().submatrix_mut(0, 0, nu, nu).copy_from(&sys.a_uu);
        let mut off = nu;
        for f in &sys.faces {
            let nf = f.a_ll.nrows();
            a.as_mut().submatrix_mut(0, off, nu, nf).copy_from(&f.a_ul);
            a.as_mut().submatrix_mut(off, 0, nf, nu).copy_from(&f.a_lu);
            a.as_mut().submatrix_mut(off, off, nf, nf).copy_from(&f.a_ll);
            off += nf;
        }
        a
    }

    #[test]
    fn diffusive_part_is_symmetric() {
        let s = slab();
        let tables = RefTables::new(Degrees::uniform(2).unwrap(), 2).unwrap();
        let p = ProblemSpec::new(2, 0.3).with_velocity(|z| [-4.0 * z[2], 4.0 * z[1]]);
        let sys = assemble_diffusive(&s.elements[4], &s.element_flips[4], 10.0, &p, &tables);
        let a = full_matrix(&sys);
        let scale = a.norm_max();
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                assert!((a[(i, j)] - a[(j, i)]).abs() < 1e-12 * scale);
            }
        }
    }

    #[test]
    fn element_equation_is_consistent_for_affine_solutions() {
        // With λ the trace of u and u affine, the element rows reduce to
        // (β·∇u + u ∇·β̄, v)_K.
        let s = slab();
        let e = 4;
        let elem = &s.elements[e];
        let tables = RefTables::new(Degrees::uniform(2).unwrap(), 2).unwrap();
        let beta = [0.7, -0.4];
        let u = |z: &StPoint| 1.0 + 0.5 * z[0] - 2.0 * z[1] + 0.3 * z[2];
        let lu = 0.5 + beta[0] * -2.0 + beta[1] * 0.3;
        let p = ProblemSpec::new(2, 0.05).with_velocity(move |_| beta);
        let roles = FaceRoles::in_slab(&s, e, false, false);
        let sys = assemble_local(elem, &s.element_flips[e], &roles, 6.0, &p, &tables);

        let c = crate::spaces::project_element(&u, elem, &tables).unwrap();
        let mut res: Vec<f64> = (0..c.len()).map(|i| (0..c.len()).map(|j| sys.a_uu[(i, j)] * c[j]).sum()).collect();
        for (face, blocks) in sys.faces.iter().enumerate() {
            let lam = project_facet(&|z, _| u(z), elem, face, s.element_flips[e][face], &tables).unwrap();
            for (i, r) in res.iter_mut().enumerate() {
                *r += (0..lam.len()).map(|a| blocks.a_ul[(i, a)] * lam[a]).sum::<f64>();
            }
        }
        let expect = crate::spaces::project_element(&|_| lu, elem, &tables).unwrap();
        let mass = crate::spaces::element_mass(elem, &tables);
        for i in 0..c.len() {
            let m: f64 = (0..c.len()).map(|j| mass[(i, j)] * expect[j]).sum();
            assert!((res[i] - m).abs() < 1e-11, "row {i}: {} vs {m}", res[i]);
        }
    }

    #[test]
    fn facet_rows_vanish_on_interior_faces_for_smooth_solutions() {
        // On an interior facet, the λ rows from both sides sum to zero for
        // a continuous affine solution whose trace is λ.
        let s = slab();
        let tables = RefTables::new(Degrees::uniform(1).unwrap(), 2).unwrap();
        let beta = [0.2, 0.9];
        let u = |z: &StPoint| 2.0 - z[0] + 0.4 * z[1] + 1.1 * z[2];
        let p = ProblemSpec::new(2, 0.1).with_velocity(move |_| beta);
        let fi = (0..s.n_vertical).find(|&f| s.facets[f].sides.len() == 2).unwrap();
        let facet = &s.facets[fi];
        let nf = tables.vertical.len();
        let mut total = vec![0.0; nf];
        let lam = {
            let sd = facet.sides[0];
            project_facet(&|z, _| u(z), &s.elements[sd.element], sd.face, sd.flip, &tables).unwrap()
        };
        for sd in &facet.sides {
            let elem = &s.elements[sd.element];
            let roles = FaceRoles::in_slab(&s, sd.element, false, false);
            let sys = assemble_local(elem, &s.element_flips[sd.element], &roles, 4.0, &p, &tables);
            let c = crate::spaces::project_element(&u, elem, &tables).unwrap();
            let b = &sys.faces[sd.face];
            for a in 0..nf {
                total[a] += (0..c.len()).map(|j| b.a_lu[(a, j)] * c[j]).sum::<f64>()
                    + (0..nf).map(|k| b.a_ll[(a, k)] * lam[k]).sum::<f64>();
            }
        }
        for t in total {
            assert!(t.abs() < 1e-12, "{t}");
        }
    }
}
