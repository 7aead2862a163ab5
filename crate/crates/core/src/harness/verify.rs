use std::fmt;

use serde::Serialize;

use super::config::RunConfig;
use super::problems::{benchmark, RotatingPulse, Translation};
use super::run::run;
use crate::analysis::{
    assemble_operator, check_boundedness, check_coercivity, check_infsup, check_poincare, estimate_trace_constants,
    measured_penalty, projection_rate_study, ConstantEstimates, ProjectionLevel, ProjectionRates, SampleReport,
};
use crate::assembly::ProblemSpec;
use crate::geometry::{BoundaryTag, Deformation, Identity, PulseDeformation, SlabBuilder, SpaceTimeSlab, SpatialMesh};
use crate::solver::{initial_trace, solve_slab, solve_slab_monolithic, SlabContext, DEFAULT_TOLERANCE};
use crate::spaces::{Degrees, RefTables};
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

fn outcome(name: impl Into<String>, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome { name: name.into(), passed, detail }
}

pub const SUITES: [&str; 7] =
    ["free-stream", "exactness", "condensation", "constants", "coercivity", "stability", "projection"];

/// Max pointwise error of the constant state on the deforming pulse mesh.
pub fn free_stream_error(p: usize, grid: usize, slabs: usize) -> Result<f64> {
    let mut cfg = RunConfig::new("free-stream", grid, slabs, Degrees::uniform(p)?, 1e-2);
    cfg.t_end = Some(1.0);
    Ok(run(&cfg)?.max_pointwise_error.unwrap_or(f64::INFINITY))
}

/// `⦀u - u_h⦀_v` for a solution lying in the discrete space.
pub fn exactness_error(p: usize, grid: usize, slabs: usize) -> Result<f64> {
    let cfg = RunConfig::new("poly-exact", grid, slabs, Degrees::uniform(p)?, 0.05);
    Ok(run(&cfg)?.error.map_or(f64::INFINITY, |e| e.v()))
}

/// Max coefficient difference between the condensed and monolithic solves
/// on a single slab of the 2 × 2 pulse mesh.
pub fn condensation_gap(p: usize) -> Result<f64> {
    let bench = benchmark("rotating-pulse", 2, 1e-2, None)?;
    let mesh = bench.mesh(2, 2, 2)?;
    let slab = SlabBuilder::new(&mesh, bench.deformation.as_ref())?.build(0, 0.0, 0.125)?;
    let tables = RefTables::new(Degrees::uniform(p)?, 2)?;
    let alpha = measured_penalty(&slab, &tables)?;
    let ctx = SlabContext {
        slab: &slab,
        tables: &tables,
        problem: &bench.problem,
        alpha,
        bottom_neumann: true,
        top_neumann: true,
        tolerance: DEFAULT_TOLERANCE,
    };
    let bottom = initial_trace(&slab, &bench.problem, &tables)?;
    let a = solve_slab(&ctx, &bottom)?;
    let b = solve_slab_monolithic(&ctx, &bottom)?;
    let du = a.coeffs.iter().flatten().zip(b.coeffs.iter().flatten()).map(|(x, y)| (x - y).abs());
    let dl = a.lambda.iter().zip(&b.lambda).map(|(x, y)| (x - y).abs());
    Ok(du.chain(dl).fold(0.0, f64::max))
}

/// Parallelogram cells on the unit square translated rigidly in time, so
/// every space-time element is an affine image of the reference cube.
pub fn affine_mesh(n: usize, tag: BoundaryTag) -> SpatialMesh {
    let mut m = SpatialMesh::uniform_grid(n, n, [0.0, 0.0], [1.0, 1.0], |_| tag);
    for v in &mut m.vertices {
        v[0] += 0.3 * v[1];
    }
    m
}

const AFFINE_MOTION: Translation = Translation([0.2, -0.1]);

/// Name and accessor of each estimated constant.
pub type ConstantColumn = (&'static str, fn(&ConstantEstimates) -> f64);

pub const CONSTANT_COLUMNS: [ConstantColumn; 4] = [
    ("c_TQ", |c| c.trace_q),
    ("c_IS", |c| c.inverse_space),
    ("c_IT", |c| c.inverse_time),
    ("c_TdK", |c| c.trace_boundary),
];

/// Trace and inverse constants on `levels` simultaneous refinements of the
/// affine family (`n = 2, 4, 8, ..` cells per side, `Δt = 1/(2n)`).
pub fn affine_constants(p: usize, levels: usize) -> Result<Vec<ConstantEstimates>> {
    let tables = RefTables::new(Degrees::uniform(p)?, 2)?;
    (0..levels)
        .map(|l| {
            let n = 2 << l;
            let mesh = affine_mesh(n, BoundaryTag::Neumann);
            let slab = SlabBuilder::new(&mesh, &AFFINE_MOTION)?.build(0, 0.0, 0.5 / n as f64)?;
            estimate_trace_constants(&slab, &tables, &format!("affine n={n}"))
        })
        .collect()
}

/// One mesh family for stability sampling.
pub struct Family {
    pub name: &'static str,
    pub slab: SpaceTimeSlab,
    pub problem: ProblemSpec,
}

/// Three single-slab families: Dirichlet Cartesian with pure diffusion, the deforming
/// pulse mesh with rotating advection, and the sheared moving mesh with
/// uniform advection. `n` cells per side.
pub fn sampling_families(n: usize) -> Result<Vec<Family>> {
    let dt = 0.5 / n as f64;
    let build = |mesh: &SpatialMesh, d: &dyn Deformation| SlabBuilder::new(mesh, d)?.build(0, 0.0, dt);
    let neumann = |_: [f64; 2]| BoundaryTag::Neumann;
    // Without advection the L² control comes from the Dirichlet boundary.
    let cart = SpatialMesh::uniform_grid(n, n, [0.0, 0.0], [1.0, 1.0], |_| BoundaryTag::Dirichlet);
    let pulse = SpatialMesh::uniform_grid(n, n, [-0.5, -0.5], [0.5, 0.5], neumann);
    let sheared = affine_mesh(n, BoundaryTag::Neumann);
    Ok(vec![
        Family { name: "cartesian", slab: build(&cart, &Identity)?, problem: ProblemSpec::new(2, 1.0) },
        Family {
            name: "pulse-deformed",
            slab: build(&pulse, &PulseDeformation::new(0.1))?,
            problem: ProblemSpec::new(2, 1e-2).with_velocity(|z| [-4.0 * z[2], 4.0 * z[1]]),
        },
        Family {
            name: "sheared-moving",
            slab: build(&sheared, &AFFINE_MOTION)?,
            problem: ProblemSpec::new(2, 0.1).with_velocity(|_| [1.0, 0.5]),
        },
    ])
}

#[derive(Debug, Clone, Serialize)]
pub struct CoercivitySample {
    pub family: String,
    pub alpha: f64,
    pub trace_q_squared: f64,
    pub report: SampleReport,
}

impl CoercivitySample {
    /// Positive sampled minimum, α above the threshold, and no discrete
    /// kernel in the sharp generalized eigenvalue.
    pub fn holds(&self) -> bool {
        self.report.sampled > 0.0 && self.alpha > self.trace_q_squared && self.report.sharp.is_none_or(|c| c > 1e-8)
    }
}

pub fn coercivity_study(p: usize, n: usize, samples: usize, seed: u64) -> Result<Vec<CoercivitySample>> {
    let tables = RefTables::new(Degrees::uniform(p)?, 2)?;
    sampling_families(n)?
        .into_iter()
        .map(|f| {
            let c = estimate_trace_constants(&f.slab, &tables, f.name)?;
            let alpha = 2.0 * c.trace_q * c.trace_q;
            let op = assemble_operator(&f.slab, &f.problem, &tables, alpha)?;
            Ok(CoercivitySample {
                family: f.name.to_string(),
                alpha,
                trace_q_squared: c.trace_q * c.trace_q,
                report: check_coercivity(&op, samples, seed),
            })
        })
        .collect()
}

/// Discrete Poincaré constant on all-Dirichlet Cartesian meshes.
pub fn poincare_constant(p: usize, n: usize, samples: usize, seed: u64) -> Result<SampleReport> {
    let tables = RefTables::new(Degrees::uniform(p)?, 2)?;
    let mesh = SpatialMesh::uniform_grid(n, n, [0.0, 0.0], [1.0, 1.0], |_| BoundaryTag::Dirichlet);
    let slab = SlabBuilder::new(&mesh, &Identity)?.build(0, 0.0, 0.5 / n as f64)?;
    let op = assemble_operator(&slab, &ProblemSpec::new(2, 1.0), &tables, 1.0)?;
    Ok(check_poincare(&op, samples, seed))
}

/// Boundedness and inf-sup samples on the pulse-deformed family.
pub fn stability_samples(p: usize, n: usize, samples: usize, seed: u64) -> Result<(SampleReport, SampleReport)> {
    let tables = RefTables::new(Degrees::uniform(p)?, 2)?;
    let fam = sampling_families(n)?.into_iter().nth(1).expect("three families");
    let alpha = measured_penalty(&fam.slab, &tables)?;
    let op = assemble_operator(&fam.slab, &fam.problem, &tables, alpha)?;
    Ok((check_boundedness(&op, samples, seed), check_infsup(&op, samples, seed, 2.0)))
}

/// Projection slopes for the rotating pulse on the deforming mesh over
/// `(0, 1/4)`, with `n = 16, 32, 64` cells per side and `n / 4` slabs.
pub fn projection_study(p: usize) -> Result<ProjectionRates> {
    let u = RotatingPulse::new(1e-2);
    let meshes: Vec<(SpatialMesh, usize)> = [16usize, 32, 64]
        .iter()
        .map(|&n| (SpatialMesh::uniform_grid(n, n, [-0.5, -0.5], [0.5, 0.5], |_| BoundaryTag::Neumann), n / 4))
        .collect();
    let levels: Vec<ProjectionLevel> = meshes.iter().map(|(m, s)| ProjectionLevel { mesh: m, n_slabs: *s }).collect();
    Ok(projection_rate_study(&levels, &PulseDeformation::new(0.1), &u, Degrees::uniform(p)?, 0.0, 0.25)?.1)
}

fn spread(values: &[f64]) -> f64 {
    let hi = values.iter().cloned().fold(f64::MIN, f64::max);
    let lo = values.iter().cloned().fold(f64::MAX, f64::min);
    (hi - lo) / lo
}

/// Runs a named suite and reports one outcome per check.
pub fn run_suite(name: &str, seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    match name {
        "free-stream" => {
            for p in 1..=3 {
                let e = free_stream_error(p, 4, 8)?;
                out.push(outcome(format!("free-stream p={p}"), e <= 1e-9, format!("max error {e:.2e}")));
            }
        }
        "exactness" => {
            for p in 2..=3 {
                let e = exactness_error(p, 3, 2)?;
                out.push(outcome(format!("discrete exactness p={p}"), e <= 1e-9, format!("error_v {e:.2e}")));
            }
        }
        "condensation" => {
            for p in 1..=3 {
                let g = condensation_gap(p)?;
                out.push(outcome(format!("condensed vs monolithic p={p}"), g <= 1e-10, format!("max gap {g:.2e}")));
            }
        }
        "constants" => {
            for p in 1..=2 {
                let c = affine_constants(p, 3)?;
                for (label, f) in CONSTANT_COLUMNS {
                    let v: Vec<f64> = c.iter().map(f).collect();
                    let s = spread(&v);
                    out.push(outcome(format!("{label} p={p}"), s < 0.1, format!("{v:.4?}, spread {:.2}%", 100.0 * s)));
                }
            }
        }
        "coercivity" => {
            for p in 1..=2 {
                for s in coercivity_study(p, 3, 200, seed)? {
                    out.push(outcome(
                        format!("coercivity p={p} {}", s.family),
                        s.holds(),
                        format!(
                            "min ratio {:.3e} (sharp {:.3e}), alpha {:.2} > c_TQ^2 {:.2}",
                            s.report.sampled,
                            s.report.sharp.unwrap_or(f64::NAN),
                            s.alpha,
                            s.trace_q_squared
                        ),
                    ));
                }
                let cp: Vec<SampleReport> =
                    [2, 4].iter().map(|&n| poincare_constant(p, n, 200, seed)).collect::<Result<_>>()?;
                out.push(outcome(
                    format!("poincare p={p}"),
                    cp.iter().all(|r| r.sampled > 0.0 && r.sampled.is_finite()),
                    format!("c_p sampled {:.3} / {:.3}", cp[0].sampled, cp[1].sampled),
                ));
            }
        }
        "stability" => {
            let (b1, i1) = stability_samples(1, 2, 50, seed)?;
            let (b2, i2) = stability_samples(1, 4, 50, seed)?;
            let drift = (b1.sampled / b2.sampled).max(b2.sampled / b1.sampled);
            out.push(outcome(
                "boundedness drift",
                drift < 2.0,
                format!("c_B {:.3} -> {:.3} (sharp {:?} -> {:?})", b1.sampled, b2.sampled, b1.sharp, b2.sharp),
            ));
            out.push(outcome(
                "inf-sup test function",
                i1.sampled > 0.0 && i2.sampled > 0.0,
                format!("c_i {:.3e} / {:.3e}", i1.sampled, i2.sampled),
            ));
        }
        "projection" => {
            for p in 1..=2 {
                let r = projection_study(p)?;
                let pf = p as f64;
                for (label, got, want) in
                    [("L2", r.l2, pf + 1.0), ("gradient", r.gradient, pf), ("trace", r.trace, pf + 0.5)]
                {
                    out.push(outcome(
                        format!("projection {label} p={p}"),
                        (got - want).abs() <= 0.25,
                        format!("slope {got:.2}, predicted {want}"),
                    ));
                }
            }
        }
        "all" => {
            for s in SUITES {
                out.extend(run_suite(s, seed)?);
            }
        }
        other => return Err(Error::UnknownSuite(other.to_string())),
    }
    Ok(out)
}
