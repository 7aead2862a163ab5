use std::fs;
use std::io::BufWriter;

use serde::Serialize;

use super::config::RunConfig;
use super::problems::benchmark;
use crate::analysis::{error_tables, max_pointwise_error, measured_penalty, slab_error, NormReport};
use crate::assembly::{default_penalty, Problem};
use crate::geometry::vtk::{write_slabs, NodalField};
use crate::geometry::{Deformation, SlabBuilder, SpaceTimeSlab, SpatialMesh};
use crate::solver::{march, write_checkpoint, MarchConfig, SlabSolution};
use crate::spaces::{Degrees, RefTables};
use crate::Result;

/// Where the interior-penalty parameter came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PenaltySource {
    Config,
    Measured,
    Fallback,
}

/// `α` from the configuration, else `2 max c²_{T,Q}` measured on the first
/// slab, else `4 (p_s + 1)²`.
pub fn resolve_penalty(
    alpha: Option<f64>,
    mesh: &SpatialMesh,
    deform: &dyn Deformation,
    degrees: Degrees,
    t0: f64,
    dt: f64,
) -> (f64, PenaltySource) {
    if let Some(a) = alpha {
        return (a, PenaltySource::Config);
    }
    let measured = RefTables::new(degrees, mesh.dim).and_then(|tables| {
        let slab = SlabBuilder::new(mesh, deform)?.build(0, t0, t0 + dt)?;
        measured_penalty(&slab, &tables)
    });
    match measured {
        Ok(a) if a.is_finite() && a > 0.0 => (a, PenaltySource::Measured),
        _ => (default_penalty(degrees.p_s), PenaltySource::Fallback),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SlabRecord {
    pub slab: usize,
    pub t0: f64,
    pub t1: f64,
    pub residual: f64,
    pub error_s_squared: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub problem: String,
    pub cells: usize,
    pub slabs: usize,
    pub degrees: Degrees,
    pub nu: f64,
    pub alpha: f64,
    pub penalty_source: PenaltySource,
    /// Error norm components summed over all slabs, when an exact solution exists.
    pub error: Option<NormReport>,
    pub max_pointwise_error: Option<f64>,
    pub max_residual: f64,
    pub records: Vec<SlabRecord>,
}

/// Corner values of `u_h`, in element node order.
fn nodal_values(slab: &SpaceTimeSlab, sol: &SlabSolution, tables: &RefTables) -> Vec<f64> {
    let dd = slab.dim + 1;
    let nodes = 2 << slab.dim;
    let mut vals = vec![0.0; tables.n_modes()];
    let mut out = Vec::with_capacity(slab.n_elements() * nodes);
    for c in &sol.coeffs {
        for node in 0..nodes {
            let mut xi = [0.0; 3];
            for (k, x) in xi.iter_mut().enumerate().take(dd) {
                *x = if node >> k & 1 == 1 { 1.0 } else { -1.0 };
            }
            tables.basis.values(&xi, &mut vals);
            out.push(vals.iter().zip(c).map(|(a, b)| a * b).sum());
        }
    }
    out
}

pub fn run(cfg: &RunConfig) -> Result<RunReport> {
    cfg.validate()?;
    let bench = benchmark(&cfg.problem, cfg.dim, cfg.nu, cfg.amplitude)?;
    let mesh = bench.mesh(cfg.dim, cfg.grid[0], *cfg.grid.get(1).unwrap_or(&1))?;
    let t_end = cfg.final_time(bench.t_end);
    let degrees = Degrees::new(cfg.degrees.p_t, cfg.degrees.p_s)?;
    let dt = t_end / cfg.slabs as f64;
    let (alpha, penalty_source) = resolve_penalty(cfg.alpha, &mesh, bench.deformation.as_ref(), degrees, 0.0, dt);
    let march_cfg = MarchConfig {
        degrees,
        alpha,
        t0: 0.0,
        t_end,
        n_slabs: cfg.slabs,
        final_top_neumann: true,
        tolerance: cfg.tolerance,
    };

    let problem = &bench.problem;
    let exact = problem.exact();
    let etab = error_tables(degrees, cfg.dim)?;
    let mut error = exact.map(|_| NormReport::default());
    let mut max_pw = exact.map(|_| 0.0f64);
    let mut records = Vec::with_capacity(cfg.slabs);
    let mut vtk_slabs = Vec::new();
    let mut vtk_values = Vec::new();
    march(problem, &mesh, bench.deformation.as_ref(), &march_cfg, |slab, tables, sol| {
        let mut rec =
            SlabRecord { slab: slab.index, t0: slab.t0, t1: slab.t1, residual: sol.residual, error_s_squared: None };
        if let Some(u) = exact {
            let last = slab.index + 1 == cfg.slabs;
            let r = slab_error(slab, sol, problem, u, &etab, slab.index == 0, last);
            rec.error_s_squared = Some(r.s_squared());
            *error.as_mut().unwrap() += r;
            let m = max_pw.as_mut().unwrap();
            *m = m.max(max_pointwise_error(slab, sol, u, &etab));
        }
        if let Some(dir) = &cfg.output.checkpoints {
            write_checkpoint(dir, slab, degrees, sol)?;
        }
        if cfg.output.vtk.is_some() {
            vtk_values.push(nodal_values(slab, sol, tables));
            vtk_slabs.push(slab.clone());
        }
        records.push(rec);
        Ok(())
    })?;

    if let Some(path) = &cfg.output.vtk {
        let mut out = BufWriter::new(fs::File::create(path)?);
        write_slabs(&mut out, &vtk_slabs, Some(NodalField { name: "u_h", values: &vtk_values }))?;
    }
    if let Some(path) = &cfg.output.csv {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["slab", "t0", "t1", "residual", "error_s_squared"])?;
        for r in &records {
            w.write_record([
                r.slab.to_string(),
                format!("{:.12e}", r.t0),
                format!("{:.12e}", r.t1),
                format!("{:.6e}", r.residual),
                r.error_s_squared.map_or(String::new(), |e| format!("{e:.12e}")),
            ])?;
        }
        w.flush()?;
    }

    Ok(RunReport {
        problem: cfg.problem.clone(),
        cells: mesh.cells.len(),
        slabs: cfg.slabs,
        degrees,
        nu: cfg.nu,
        alpha,
        penalty_source,
        error,
        max_pointwise_error: max_pw,
        max_residual: records.iter().map(|r| r.residual).fold(0.0, f64::max),
        records,
    })
}
