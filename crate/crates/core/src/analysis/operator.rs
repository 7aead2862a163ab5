use faer::prelude::*;
use faer::{Mat, MatMut, Side};

use super::norms::{time_weight, volume_weight, NormReport};
use crate::assembly::local::{gram, weighted, ElementData};
use crate::assembly::{assemble_advective, assemble_diffusive, FaceRoles, LocalSystem, Problem};
use crate::geometry::{is_vertical, SpaceTimeSlab};
use crate::spaces::{element_mass, RefTables};
use crate::{Error, Result};

/// Dense operators on one slab treated as the whole space-time domain:
/// every facet, including bottom and top, carries trace unknowns, and both
/// horizontal boundaries belong to `∂E_N`. Dirichlet facets carry none.
///
/// Unknowns are ordered element by element, then facet by facet.
pub struct SlabOperator {
    pub n_element_dofs: usize,
    pub advective: Mat<f64>,
    pub diffusive: Mat<f64>,
    /// One matrix per [`NormReport`] component.
    pub components: Vec<Mat<f64>>,
    /// Offset of each facet's unknowns, `None` for Dirichlet facets.
    pub facet_offsets: Vec<Option<usize>>,
    pub n_modes: usize,
    /// Per element, the map `w ↦ P_K[Δt h²/(Δt + h) ∂_t w]` on coefficients.
    pub time_lift: Vec<Mat<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    V,
    S,
    SStar,
}

impl NormKind {
    fn n_components(self) -> usize {
        match self {
            NormKind::V => 5,
            NormKind::S => 6,
            NormKind::SStar => 10,
        }
    }
}

impl SlabOperator {
    pub fn dim(&self) -> usize {
        self.advective.nrows()
    }

    /// `a_h = a_h^a + a_h^d`, rows indexing test functions.
    pub fn form(&self) -> Mat<f64> {
        &self.advective + &self.diffusive
    }

    pub fn norm_matrix(&self, kind: NormKind) -> Mat<f64> {
        let n = self.dim();
        let mut m = Mat::zeros(n, n);
        for c in &self.components[..kind.n_components()] {
            m += c;
        }
        m
    }

    /// Norm components of a discrete pair.
    pub fn report(&self, x: &[f64]) -> NormReport {
        let mut c = [0.0; 10];
        for (k, m) in self.components.iter().enumerate() {
            c[k] = quadratic(m, x, x);
        }
        NormReport::from_components(c)
    }
}

/// `yᵀ A x`.
pub fn quadratic(a: &Mat<f64>, y: &[f64], x: &[f64]) -> f64 {
    let mut s = 0.0;
    for j in 0..a.ncols() {
        if x[j] == 0.0 {
            continue;
        }
        let col = a.col(j);
        let mut t = 0.0;
        for i in 0..a.nrows() {
            t += y[i] * col[i];
        }
        s += t * x[j];
    }
    s
}

pub fn assemble_operator(
    slab: &SpaceTimeSlab,
    problem: &dyn Problem,
    tables: &RefTables,
    alpha: f64,
) -> Result<SlabOperator> {
    let nu = tables.n_modes();
    let ne = slab.n_elements();
    let mut offsets = Vec::with_capacity(slab.facets.len());
    let mut n = ne * nu;
    for f in &slab.facets {
        let dirichlet = f.kind.is_vertical() && f.slot.is_none();
        if dirichlet {
            offsets.push(None);
        } else {
            offsets.push(Some(n));
            n += if f.kind.is_vertical() { tables.vertical.len() } else { tables.horizontal.len() };
        }
    }

    let mut advective = Mat::zeros(n, n);
    let mut diffusive = Mat::zeros(n, n);
    let mut components = vec![Mat::zeros(n, n); 10];
    let nfaces = slab.n_faces_per_element();
    let mut time_lift = Vec::with_capacity(ne);
    for e in 0..ne {
        let elem = &slab.elements[e];
        let flips = &slab.element_flips[e];
        let roles = FaceRoles::in_slab(slab, e, true, true);
        let locate = |face: usize| offsets[slab.element_facets[e][face]];
        let adv = assemble_advective(elem, flips, &roles, problem, tables);
        let dif = assemble_diffusive(elem, flips, alpha, problem, tables);
        scatter_system(&mut advective, &adv, e * nu, nfaces, locate);
        scatter_system(&mut diffusive, &dif, e * nu, nfaces, locate);

        let data = ElementData::new(elem, flips, problem, tables);
        time_lift.push(lift(&data, elem, tables)?);
        let local = local_norms(&data, elem.h, elem.dt, problem.diffusion(), &roles, nfaces);
        let mut dofs: Vec<Option<usize>> = (0..nu).map(|i| Some(e * nu + i)).collect();
        for face in 0..nfaces {
            let nf = tables.faces[face].n_facet_modes;
            dofs.extend((0..nf).map(|a| locate(face).map(|o| o + a)));
        }
        for (c, l) in components.iter_mut().zip(&local) {
            for (j, gj) in dofs.iter().enumerate() {
                let Some(gj) = gj else { continue };
                for (i, gi) in dofs.iter().enumerate() {
                    if let Some(gi) = gi {
                        c[(*gi, *gj)] += l[(i, j)];
                    }
                }
            }
        }
    }
    Ok(SlabOperator {
        n_element_dofs: ne * nu,
        advective,
        diffusive,
        components,
        facet_offsets: offsets,
        n_modes: nu,
        time_lift,
    })
}

fn lift(data: &ElementData, elem: &crate::geometry::ElementGeometry, tables: &RefTables) -> Result<Mat<f64>> {
    let nu = data.phi.ncols();
    let mut c = Mat::zeros(nu, nu);
    gram(c.as_mut(), &data.phi, &data.dt, &data.w, time_weight(elem.dt, elem.h));
    let llt = element_mass(elem, tables).llt(Side::Lower).map_err(|_| Error::SingularMass { element: elem.id })?;
    Ok(llt.solve(&c))
}

fn block(m: &mut Mat<f64>, r0: usize, c0: usize, rows: usize, cols: usize) -> MatMut<'_, f64> {
    m.as_mut().submatrix_mut(r0, c0, rows, cols)
}

fn scatter_system(
    dst: &mut Mat<f64>,
    sys: &LocalSystem,
    u0: usize,
    nfaces: usize,
    locate: impl Fn(usize) -> Option<usize>,
) {
    let nu = sys.a_uu.nrows();
    for j in 0..nu {
        for i in 0..nu {
            dst[(u0 + i, u0 + j)] += sys.a_uu[(i, j)];
        }
    }
    for face in 0..nfaces {
        let Some(l0) = locate(face) else { continue };
        let fb = &sys.faces[face];
        let nf = fb.a_ll.nrows();
        for a in 0..nf {
            for i in 0..nu {
                dst[(u0 + i, l0 + a)] += fb.a_ul[(i, a)];
                dst[(l0 + a, u0 + i)] += fb.a_lu[(a, i)];
            }
            for b in 0..nf {
                dst[(l0 + a, l0 + b)] += fb.a_ll[(a, b)];
            }
        }
    }
}

/// Local component matrices on `[u_K, λ_face0, .., λ_face(2d+1)]`.
fn local_norms(data: &ElementData, h: f64, dt: f64, nu_diff: f64, roles: &FaceRoles, nfaces: usize) -> Vec<Mat<f64>> {
    let nu = data.phi.ncols();
    let mut offs = vec![nu];
    for f in &data.faces {
        offs.push(offs.last().unwrap() + f.psi.ncols());
    }
    let n = offs[nfaces];
    let mut c = vec![Mat::<f64>::zeros(n, n); 10];

    gram(block(&mut c[0], 0, 0, nu, nu), &data.phi, &data.phi, &data.w, 1.0);
    for g in &data.grads {
        gram(block(&mut c[3], 0, 0, nu, nu), g, g, &data.w, nu_diff);
    }
    gram(block(&mut c[5], 0, 0, nu, nu), &data.dt, &data.dt, &data.w, time_weight(dt, h));
    gram(block(&mut c[9], 0, 0, nu, nu), &data.phi, &data.phi, &data.w, volume_weight(dt, h));

    for (face, fd) in data.faces.iter().enumerate() {
        let o = offs[face];
        let nf = fd.psi.ncols();
        let abs_bn = weighted(&fd.w, |q| fd.bn[q].abs());
        if roles.neumann[face] {
            gram(block(&mut c[1], o, o, nf, nf), &fd.psi, &fd.psi, &abs_bn, 1.0);
        }
        add_jump(&mut c[2], fd, o, &abs_bn);
        let out = weighted(&fd.w, |q| fd.bn[q].max(0.0));
        let inflow = weighted(&fd.w, |q| if fd.bn[q] > 0.0 { 0.0 } else { -fd.bn[q] });
        gram(block(&mut c[6], 0, 0, nu, nu), &fd.phi, &fd.phi, &out, 1.0);
        gram(block(&mut c[7], o, o, nf, nf), &fd.psi, &fd.psi, &inflow, 1.0);
        if is_vertical(face) {
            let pen = weighted(&fd.w, |_| nu_diff / h);
            add_jump(&mut c[4], fd, o, &pen);
            gram(block(&mut c[8], 0, 0, nu, nu), &fd.gn, &fd.gn, &fd.w, h * nu_diff);
        }
    }
    c
}

/// `∫ w (v - μ)²` on one face.
fn add_jump(m: &mut Mat<f64>, fd: &crate::assembly::local::FaceData, o: usize, w: &[f64]) {
    let nu = fd.phi.ncols();
    let nf = fd.psi.ncols();
    gram(m.as_mut().submatrix_mut(0, 0, nu, nu), &fd.phi, &fd.phi, w, 1.0);
    gram(m.as_mut().submatrix_mut(0, o, nu, nf), &fd.phi, &fd.psi, w, -1.0);
    gram(m.as_mut().submatrix_mut(o, 0, nf, nu), &fd.psi, &fd.phi, w, -1.0);
    gram(m.as_mut().submatrix_mut(o, o, nf, nf), &fd.psi, &fd.psi, w, 1.0);
}
