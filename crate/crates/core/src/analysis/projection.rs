use serde::Serialize;

use super::norms::error_tables;
use crate::assembly::ExactSolution;
use crate::geometry::{is_vertical, Deformation, SlabBuilder, SpatialMesh};
use crate::spaces::{project_element, Degrees, RefTables};
use crate::{par, Result};

/// Errors of the element L² projection `Π u` on one mesh level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectionErrors {
    pub h: f64,
    pub dt: f64,
    /// `‖u - Πu‖_E`.
    pub l2: f64,
    /// `(Σ_K ‖∇̄(u - Πu)‖²_K)^{1/2}`.
    pub gradient: f64,
    /// `(Σ_K ‖∂_t(u - Πu)‖²_K)^{1/2}`.
    pub time_derivative: f64,
    /// `(Σ_K ‖u - Πu‖²_{∂K})^{1/2}`.
    pub trace: f64,
    /// `(Σ_K ‖∇̄(u - Πu)·n̄‖²_Q)^{1/2}`.
    pub normal_gradient: f64,
}

/// Least-squares slopes of `log e` against `log h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectionRates {
    pub l2: f64,
    pub gradient: f64,
    pub time_derivative: f64,
    pub trace: f64,
    pub normal_gradient: f64,
}

/// One refinement level: a spatial mesh and a slab count over `(t0, t_end)`.
pub struct ProjectionLevel<'a> {
    pub mesh: &'a SpatialMesh,
    pub n_slabs: usize,
}

pub fn projection_errors(
    mesh: &SpatialMesh,
    deform: &dyn Deformation,
    exact: &dyn ExactSolution,
    degrees: Degrees,
    t0: f64,
    t_end: f64,
    n_slabs: usize,
) -> Result<ProjectionErrors> {
    let dim = mesh.dim;
    let dd = dim + 1;
    let tables = RefTables::new(degrees, dim)?;
    let etab = error_tables(degrees, dim)?;
    let nu = tables.n_modes();
    let builder = SlabBuilder::new(mesh, deform)?;
    let mut sums = [0.0; 5];
    let mut h = 0.0f64;
    let mut dt = 0.0;
    for k in 0..n_slabs {
        let level = |j: usize| t0 + (t_end - t0) * j as f64 / n_slabs as f64;
        let slab = builder.build(k, level(k), level(k + 1))?;
        dt = slab.dt();
        let parts = par::try_map_indexed(slab.n_elements(), |e| -> Result<[f64; 6]> {
            let elem = &slab.elements[e];
            let c = project_element(&|z| exact.value(z), elem, &tables)?;
            let mut s = [0.0; 6];
            s[5] = elem.h;
            let eval = |phi: &[f64], dphi: &[crate::StPoint], map: &crate::geometry::Mapping| {
                let mut v = 0.0;
                let mut g = [0.0; 3];
                for i in 0..nu {
                    v += c[i] * phi[i];
                    for k in 0..dd {
                        g[k] += c[i] * dphi[i][k];
                    }
                }
                let g = map.gradient(&g, dd);
                let ge = exact.gradient(&map.point);
                (exact.value(&map.point) - v, [ge[0] - g[0], ge[1] - g[1], ge[2] - g[2]])
            };
            let vol = &etab.volume;
            for (q, xi) in vol.points.iter().enumerate() {
                let map = elem.map(xi);
                let w = vol.weights[q] * map.det;
                let (ev, ge) = eval(&vol.phi[q * nu..(q + 1) * nu], &vol.dphi[q * nu..(q + 1) * nu], &map);
                s[0] += w * ev * ev;
                s[1] += w * ge[1..dd].iter().map(|v| v * v).sum::<f64>();
                s[2] += w * ge[0] * ge[0];
            }
            for (face, ft) in etab.faces.iter().enumerate() {
                for (q, xi) in ft.points.iter().enumerate() {
                    let map = elem.map(xi);
                    let (n, ds) = map.face_normal(ft.axis, ft.side, dd);
                    let w = ft.weights[q] * ds;
                    let (ev, ge) = eval(&ft.phi[q * nu..(q + 1) * nu], &ft.dphi[q * nu..(q + 1) * nu], &map);
                    s[3] += w * ev * ev;
                    if is_vertical(face) {
                        let gn: f64 = (1..dd).map(|k| ge[k] * n[k]).sum();
                        s[4] += w * gn * gn;
                    }
                }
            }
            Ok(s)
        })?;
        for p in parts {
            for i in 0..5 {
                sums[i] += p[i];
            }
            h = h.max(p[5]);
        }
    }
    Ok(ProjectionErrors {
        h,
        dt,
        l2: sums[0].sqrt(),
        gradient: sums[1].sqrt(),
        time_derivative: sums[2].sqrt(),
        trace: sums[3].sqrt(),
        normal_gradient: sums[4].sqrt(),
    })
}

/// Slope of the least-squares line through `(log x_i, log y_i)`.
pub fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Projection errors on each level and the fitted slopes.
pub fn projection_rate_study(
    levels: &[ProjectionLevel],
    deform: &dyn Deformation,
    exact: &dyn ExactSolution,
    degrees: Degrees,
    t0: f64,
    t_end: f64,
) -> Result<(Vec<ProjectionErrors>, ProjectionRates)> {
    let errs = levels
        .iter()
        .map(|l| projection_errors(l.mesh, deform, exact, degrees, t0, t_end, l.n_slabs))
        .collect::<Result<Vec<_>>>()?;
    let h: Vec<f64> = errs.iter().map(|e| e.h).collect();
    let slope = |f: fn(&ProjectionErrors) -> f64| log_slope(&h, &errs.iter().map(f).collect::<Vec<_>>());
    let rates = ProjectionRates {
        l2: slope(|e| e.l2),
        gradient: slope(|e| e.gradient),
        time_derivative: slope(|e| e.time_derivative),
        trace: slope(|e| e.trace),
        normal_gradient: slope(|e| e.normal_gradient),
    };
    Ok((errs, rates))
}
