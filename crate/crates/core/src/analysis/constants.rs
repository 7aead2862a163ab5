use faer::linalg::triangular_solve::solve_lower_triangular_in_place;
use faer::{Mat, Par, Side};
use serde::Serialize;

use crate::geometry::{is_vertical, ElementGeometry, SpaceTimeSlab};
use crate::spaces::{element_mass, RefTables};
use crate::{par, Error, Result};

/// Eigenvalues of the symmetric pencil `(A, M)` with `M` positive definite,
/// in nondecreasing order.
pub fn generalized_eigenvalues(a: &Mat<f64>, m: &Mat<f64>) -> Result<Vec<f64>> {
    let llt = m.llt(Side::Lower).map_err(|e| Error::EigSolveFailure(format!("Cholesky: {e:?}")))?;
    let l = llt.L();
    let n = a.nrows();
    // C = L⁻¹ A L⁻ᵀ
    let mut x = a.clone();
    solve_lower_triangular_in_place(l, x.as_mut(), Par::Seq);
    let mut c = x.transpose().to_owned();
    solve_lower_triangular_in_place(l, c.as_mut(), Par::Seq);
    let c = Mat::from_fn(n, n, |i, j| 0.5 * (c[(i, j)] + c[(j, i)]));
    c.self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::EigSolveFailure(format!("{e:?}")))
}

pub fn generalized_max_eigenvalue(a: &Mat<f64>, m: &Mat<f64>) -> Result<f64> {
    Ok(*generalized_eigenvalues(a, m)?.last().unwrap_or(&0.0))
}

/// Sharp local inverse and trace constants of one element.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ElementConstants {
    /// `‖v‖_Q ≤ c_{T,Q} h^{-1/2} ‖v‖_K`.
    pub trace_q: f64,
    /// `‖v‖_{∂K} ≤ c_{T,∂K} (Δt^{-1/2} + h^{-1/2}) ‖v‖_K`.
    pub trace_boundary: f64,
    /// `‖∇̄v‖_K ≤ c_{I,s} h^{-1} ‖v‖_K`.
    pub inverse_space: f64,
    /// `‖∂_t v‖_K ≤ c_{I,t} (Δt^{-1} + h^{-1}) ‖v‖_K`.
    pub inverse_time: f64,
}

impl ElementConstants {
    fn max(self, o: Self) -> Self {
        ElementConstants {
            trace_q: self.trace_q.max(o.trace_q),
            trace_boundary: self.trace_boundary.max(o.trace_boundary),
            inverse_space: self.inverse_space.max(o.inverse_space),
            inverse_time: self.inverse_time.max(o.inverse_time),
        }
    }
}

pub fn element_constants(elem: &ElementGeometry, tables: &RefTables) -> Result<ElementConstants> {
    let dd = elem.dim + 1;
    let nu = tables.n_modes();
    let mass = element_mass(elem, tables);
    let mut b_q = Mat::<f64>::zeros(nu, nu);
    let mut b_all = Mat::<f64>::zeros(nu, nu);
    let mut g_s = Mat::<f64>::zeros(nu, nu);
    let mut g_t = Mat::<f64>::zeros(nu, nu);

    let vol = &tables.volume;
    let mut grads = vec![[0.0; 3]; nu];
    for (q, xi) in vol.points.iter().enumerate() {
        let map = elem.map(xi);
        let w = vol.weights[q] * map.det;
        for (i, g) in grads.iter_mut().enumerate() {
            *g = map.gradient(&vol.dphi[q * nu + i], dd);
        }
        for j in 0..nu {
            for i in 0..nu {
                g_t[(i, j)] += w * grads[i][0] * grads[j][0];
                g_s[(i, j)] += w * (1..dd).map(|k| grads[i][k] * grads[j][k]).sum::<f64>();
            }
        }
    }
    for face in 0..2 * dd {
        let ft = &tables.faces[face];
        for (q, xi) in ft.points.iter().enumerate() {
            let map = elem.map(xi);
            let (_, ds) = map.face_normal(ft.axis, ft.side, dd);
            let w = ft.weights[q] * ds;
            let phi = &ft.phi[q * nu..(q + 1) * nu];
            for j in 0..nu {
                for i in 0..nu {
                    let v = w * phi[i] * phi[j];
                    b_all[(i, j)] += v;
                    if is_vertical(face) {
                        b_q[(i, j)] += v;
                    }
                }
            }
        }
    }
    let (h, dt) = (elem.h, elem.dt);
    Ok(ElementConstants {
        trace_q: (h * generalized_max_eigenvalue(&b_q, &mass)?).sqrt(),
        trace_boundary: generalized_max_eigenvalue(&b_all, &mass)?.sqrt() / (dt.powf(-0.5) + h.powf(-0.5)),
        inverse_space: h * generalized_max_eigenvalue(&g_s, &mass)?.sqrt(),
        inverse_time: generalized_max_eigenvalue(&g_t, &mass)?.sqrt() / (1.0 / dt + 1.0 / h),
    })
}

/// Empirical constants, each the maximum (or minimum, for coercivity) over
/// the named mesh family.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ConstantEstimates {
    pub family: String,
    pub trace_q: f64,
    pub trace_boundary: f64,
    pub inverse_space: f64,
    pub inverse_time: f64,
    pub poincare: Option<f64>,
    pub coercivity: Option<f64>,
}

/// Maximum of the local constants over all elements of `slab`.
pub fn estimate_trace_constants(slab: &SpaceTimeSlab, tables: &RefTables, family: &str) -> Result<ConstantEstimates> {
    let per = par::try_map_indexed(slab.n_elements(), |e| element_constants(&slab.elements[e], tables))?;
    let m = per.into_iter().fold(ElementConstants::default(), ElementConstants::max);
    Ok(ConstantEstimates {
        family: family.to_string(),
        trace_q: m.trace_q,
        trace_boundary: m.trace_boundary,
        inverse_space: m.inverse_space,
        inverse_time: m.inverse_time,
        poincare: None,
        coercivity: None,
    })
}

/// Penalty `α = 2 max_K c²_{T,Q}` over the elements of `slab`.
pub fn measured_penalty(slab: &SpaceTimeSlab, tables: &RefTables) -> Result<f64> {
    let c = estimate_trace_constants(slab, tables, "")?;
    Ok(2.0 * c.trace_q * c.trace_q)
}
