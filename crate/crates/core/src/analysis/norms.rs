use serde::Serialize;

use crate::assembly::{ExactSolution, Problem};
use crate::geometry::{is_vertical, FacetKind, SpaceTimeSlab, BOTTOM, TOP};
use crate::par;
use crate::solver::SlabSolution;
use crate::spaces::{gauss_legendre, Degrees, RefTables};

/// Squared components of the mesh-dependent norms.
///
/// `⦀·⦀_v` sums the first five, `⦀·⦀_s` adds `time_derivative`, and
/// `⦀·⦀_{s,⋆}` adds the remaining four.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct NormReport {
    /// `‖v‖²_E`.
    pub volume: f64,
    /// `‖β_n^{1/2} μ‖²` over `∂E_N`.
    pub neumann: f64,
    /// `Σ_K ‖β_n^{1/2} (v - μ)‖²_{∂K}`.
    pub jump: f64,
    /// `Σ_K ν ‖∇̄v‖²_K`.
    pub gradient: f64,
    /// `Σ_K (ν / h_K) ‖v - μ‖²_Q`.
    pub penalty: f64,
    /// `Σ_K Δt h_K² / (Δt + h_K) ‖∂_t v‖²_K`.
    pub time_derivative: f64,
    /// `Σ_K ‖β_n^{1/2} v‖²` over outflow faces.
    pub outflow: f64,
    /// `Σ_K ‖β_n^{1/2} μ‖²` over inflow faces.
    pub inflow: f64,
    /// `Σ_K h_K ν ‖∇̄v · n̄‖²_Q`.
    pub normal_gradient: f64,
    /// `Σ_K (Δt + h_K) / (Δt h_K²) ‖v‖²_K`.
    pub weighted_volume: f64,
}

impl NormReport {
    pub const NAMES: [&'static str; 10] = [
        "volume",
        "neumann",
        "jump",
        "gradient",
        "penalty",
        "time_derivative",
        "outflow",
        "inflow",
        "normal_gradient",
        "weighted_volume",
    ];

    pub fn components(&self) -> [f64; 10] {
        [
            self.volume,
            self.neumann,
            self.jump,
            self.gradient,
            self.penalty,
            self.time_derivative,
            self.outflow,
            self.inflow,
            self.normal_gradient,
            self.weighted_volume,
        ]
    }

    pub fn from_components(c: [f64; 10]) -> Self {
        NormReport {
            volume: c[0],
            neumann: c[1],
            jump: c[2],
            gradient: c[3],
            penalty: c[4],
            time_derivative: c[5],
            outflow: c[6],
            inflow: c[7],
            normal_gradient: c[8],
            weighted_volume: c[9],
        }
    }

    pub fn v_squared(&self) -> f64 {
        self.volume + self.neumann + self.jump + self.gradient + self.penalty
    }

    pub fn s_squared(&self) -> f64 {
        self.v_squared() + self.time_derivative
    }

    pub fn s_star_squared(&self) -> f64 {
        self.s_squared() + self.outflow + self.inflow + self.normal_gradient + self.weighted_volume
    }

    pub fn v(&self) -> f64 {
        self.v_squared().sqrt()
    }

    pub fn s(&self) -> f64 {
        self.s_squared().sqrt()
    }

    pub fn s_star(&self) -> f64 {
        self.s_star_squared().sqrt()
    }
}

impl std::ops::AddAssign for NormReport {
    fn add_assign(&mut self, rhs: Self) {
        let mut c = self.components();
        for (a, b) in c.iter_mut().zip(rhs.components()) {
            *a += b;
        }
        *self = Self::from_components(c);
    }
}

/// Weight of the time-derivative term.
pub fn time_weight(dt: f64, h: f64) -> f64 {
    dt * h * h / (dt + h)
}

/// Weight of the volume term in `⦀·⦀_{s,⋆}`.
pub fn volume_weight(dt: f64, h: f64) -> f64 {
    (dt + h) / (dt * h * h)
}

/// Tables for error integration: three points beyond the highest degree.
pub fn error_tables(degrees: Degrees, dim: usize) -> crate::Result<RefTables> {
    RefTables::with_rule(degrees, dim, gauss_legendre(degrees.p_t.max(degrees.p_s) + 3))
}

/// Norm components of `(u - u_h, γ(u) - λ_h)` on one slab.
///
/// `bottom_neumann` and `top_neumann` state whether the slab's bottom and
/// top faces lie on `∂E_N`.
pub fn slab_error(
    slab: &SpaceTimeSlab,
    sol: &SlabSolution,
    problem: &dyn Problem,
    exact: &dyn ExactSolution,
    tables: &RefTables,
    bottom_neumann: bool,
    top_neumann: bool,
) -> NormReport {
    let dim = slab.dim;
    let dd = dim + 1;
    let nu = tables.n_modes();
    let nf = tables.vertical.len();
    let nuv = problem.diffusion();
    let zeros = vec![0.0; nf];

    let parts = par::map_indexed(slab.n_elements(), |e| {
        let elem = &slab.elements[e];
        let c = &sol.coeffs[e];
        let (h, dt) = (elem.h, elem.dt);
        let mut r = NormReport::default();
        let vol = &tables.volume;
        for (q, xi) in vol.points.iter().enumerate() {
            let map = elem.map(xi);
            let w = vol.weights[q] * map.det;
            let (uh, guh) = evaluate(c, &vol.phi[q * nu..(q + 1) * nu], &vol.dphi[q * nu..(q + 1) * nu], &map, dd);
            let ev = exact.value(&map.point) - uh;
            let g = exact.gradient(&map.point);
            let ge: Vec<f64> = (0..dd).map(|k| g[k] - guh[k]).collect();
            r.volume += w * ev * ev;
            r.weighted_volume += volume_weight(dt, h) * w * ev * ev;
            r.gradient += nuv * w * ge[1..].iter().map(|v| v * v).sum::<f64>();
            r.time_derivative += time_weight(dt, h) * w * ge[0] * ge[0];
        }

        for face in 0..2 * dd {
            let ft = &tables.faces[face];
            let (facet, flip) = slab.facet_of(e, face);
            let (lam, neumann): (&[f64], bool) = match facet.kind {
                FacetKind::Bottom => (&sol.bottom[e], bottom_neumann),
                FacetKind::Top => (&sol.top[e], top_neumann),
                FacetKind::VerticalInterior => (&sol.lambda[facet.slot.unwrap() * nf..][..nf], false),
                FacetKind::VerticalBoundary(tag) => match facet.slot {
                    Some(s) => (&sol.lambda[s * nf..][..nf], tag == crate::geometry::BoundaryTag::Neumann),
                    None => (&zeros, false),
                },
            };
            let mut psi = vec![0.0; ft.n_facet_modes];
            for (q, xi) in ft.points.iter().enumerate() {
                let map = elem.map(xi);
                let (mut n, ds) = map.face_normal(ft.axis, ft.side, dd);
                if face == BOTTOM || face == TOP {
                    n = [ft.side, 0.0, 0.0];
                }
                let w = ft.weights[q] * ds;
                let beta = problem.st_velocity(&map.point);
                let bn: f64 = (0..dd).map(|k| beta[k] * n[k]).sum();
                ft.psi_at(q, flip, &mut psi);
                let mu_h: f64 = psi.iter().zip(lam).map(|(a, b)| a * b).sum();
                let (uh, guh) = evaluate(c, &ft.phi[q * nu..(q + 1) * nu], &ft.dphi[q * nu..(q + 1) * nu], &map, dd);
                let u = exact.value(&map.point);
                let (ev, em) = (u - uh, u - mu_h);
                let jump = ev - em;
                if neumann {
                    r.neumann += w * bn.abs() * em * em;
                }
                r.jump += w * bn.abs() * jump * jump;
                if bn > 0.0 {
                    r.outflow += w * bn * ev * ev;
                } else {
                    r.inflow += w * bn.abs() * em * em;
                }
                if is_vertical(face) {
                    let g = exact.gradient(&map.point);
                    let gn: f64 = (1..dd).map(|k| (g[k] - guh[k]) * n[k]).sum();
                    r.penalty += nuv / h * w * jump * jump;
                    r.normal_gradient += h * nuv * w * gn * gn;
                }
            }
        }
        r
    });
    let mut total = NormReport::default();
    for p in parts {
        total += p;
    }
    total
}

fn evaluate(
    c: &[f64],
    phi: &[f64],
    dphi: &[crate::StPoint],
    map: &crate::geometry::Mapping,
    dd: usize,
) -> (f64, crate::StPoint) {
    let mut v = 0.0;
    let mut g = [0.0; 3];
    for (i, &ci) in c.iter().enumerate() {
        v += ci * phi[i];
        for k in 0..dd {
            g[k] += ci * dphi[i][k];
        }
    }
    (v, map.gradient(&g, dd))
}

/// `max |u - u_h|` over the volume quadrature points of `tables`.
pub fn max_pointwise_error(
    slab: &SpaceTimeSlab,
    sol: &SlabSolution,
    exact: &dyn ExactSolution,
    tables: &RefTables,
) -> f64 {
    let nu = tables.n_modes();
    let vol = &tables.volume;
    par::map_indexed(slab.n_elements(), |e| {
        let elem = &slab.elements[e];
        let c = &sol.coeffs[e];
        vol.points.iter().enumerate().fold(0.0f64, |m, (q, xi)| {
            let uh: f64 = c.iter().zip(&vol.phi[q * nu..(q + 1) * nu]).map(|(a, b)| a * b).sum();
            m.max((exact.value(&elem.map(xi).point) - uh).abs())
        })
    })
    .into_iter()
    .fold(0.0, f64::max)
}
