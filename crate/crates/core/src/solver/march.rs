use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use super::condense::{condense, CondensedElement};
use crate::assembly::{assemble_local, FaceRoles, Problem};
use crate::geometry::{Deformation, SlabBuilder, SpaceTimeSlab, SpatialMesh, BOTTOM};
use crate::spaces::{project_facet, Degrees, RefTables};
use crate::{par, Error, Result};

/// Default backward-error threshold for the global trace solve.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;
const MAX_REFINEMENTS: usize = 3;

/// Everything needed to assemble and solve one slab.
pub struct SlabContext<'a> {
    pub slab: &'a SpaceTimeSlab,
    pub tables: &'a RefTables,
    pub problem: &'a dyn Problem,
    pub alpha: f64,
    /// Whether the bottom and top faces belong to `∂E_N`.
    pub bottom_neumann: bool,
    pub top_neumann: bool,
    /// Backward-error threshold for the trace solve.
    pub tolerance: f64,
}

impl SlabContext<'_> {
    pub fn roles(&self, e: usize) -> FaceRoles {
        FaceRoles::in_slab(self.slab, e, self.bottom_neumann, self.top_neumann)
    }
}

#[derive(Debug, Clone)]
pub struct SlabSolution {
    /// Element coefficients, one vector per element.
    pub coeffs: Vec<Vec<f64>>,
    /// Vertical facet traces, `lambda[slot * nf + a]`.
    pub lambda: Vec<f64>,
    /// Bottom traces used as data.
    pub bottom: Vec<Vec<f64>>,
    /// Top traces, the data for the next slab.
    pub top: Vec<Vec<f64>>,
    /// Normwise backward error of the global solve.
    pub residual: f64,
}

/// Trace of an element function on the top face. Since `L_i(1) = 1`, the
/// coefficient of spatial mode `j` is the sum over temporal modes.
pub fn top_trace(coeffs: &[f64], tables: &RefTables) -> Vec<f64> {
    let ns = tables.basis.spatial_len();
    let mut out = vec![0.0; ns];
    for (m, &c) in coeffs.iter().enumerate() {
        out[m % ns] += c;
    }
    out
}

/// Projection of the initial data onto the bottom faces of `slab`.
pub fn initial_trace(slab: &SpaceTimeSlab, problem: &dyn Problem, tables: &RefTables) -> Result<Vec<Vec<f64>>> {
    par::try_map_indexed(slab.n_elements(), |e| {
        project_facet(&|z, n| problem.boundary_data(z, n), &slab.elements[e], BOTTOM, false, tables)
    })
}

/// Condenses every element, solves the trace system, recovers `u_h`.
pub fn solve_slab(ctx: &SlabContext, bottom: &[Vec<f64>]) -> Result<SlabSolution> {
    let slab = ctx.slab;
    let nf = ctx.tables.vertical.len();
    let condensed: Vec<CondensedElement> = par::try_map_indexed(slab.n_elements(), |e| {
        let sys = assemble_local(
            &slab.elements[e],
            &slab.element_flips[e],
            &ctx.roles(e),
            ctx.alpha,
            ctx.problem,
            ctx.tables,
        );
        condense(slab, e, sys, &bottom[e])
    })?;

    let n = slab.n_slots * nf;
    let mut triplets = Vec::new();
    let mut rhs = vec![0.0; n];
    for ce in &condensed {
        let global: Vec<usize> = ce.slots.iter().flat_map(|&s| (0..nf).map(move |a| s * nf + a)).collect();
        for (i, &gi) in global.iter().enumerate() {
            rhs[gi] += ce.r[i];
            for (j, &gj) in global.iter().enumerate() {
                triplets.push(Triplet::new(gi, gj, ce.s[(i, j)]));
            }
        }
    }
    let (lambda, residual) = if n == 0 { (Vec::new(), 0.0) } else { solve_sparse(n, &triplets, &rhs, ctx.tolerance)? };

    let coeffs: Vec<Vec<f64>> = par::map_indexed(condensed.len(), |e| condensed[e].recover(&lambda, nf));
    let top = coeffs.iter().map(|c| top_trace(c, ctx.tables)).collect();
    Ok(SlabSolution { coeffs, lambda, bottom: bottom.to_vec(), top, residual })
}

fn solve_sparse(n: usize, triplets: &[Triplet<usize, usize, f64>], rhs: &[f64], tol: f64) -> Result<(Vec<f64>, f64)> {
    let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, triplets)
        .map_err(|e| Error::SolveFailure { residual: f64::NAN, reason: format!("{e:?}") })?;
    let lu = a.sp_lu().map_err(|e| Error::SolveFailure { residual: f64::NAN, reason: format!("{e:?}") })?;
    let b = Mat::from_fn(n, 1, |i, _| rhs[i]);
    let mut x = lu.solve(&b);

    let a_norm = row_sum_norm(n, triplets);
    let b_norm = rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut err = f64::INFINITY;
    for step in 0..=MAX_REFINEMENTS {
        let r = residual(n, triplets, &x, rhs);
        let x_norm = (0..n).fold(0.0f64, |m, i| m.max(x[(i, 0)].abs()));
        let r_norm = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let scale = a_norm * x_norm + b_norm;
        err = if scale > 0.0 { r_norm / scale } else { 0.0 };
        if err <= tol || step == MAX_REFINEMENTS {
            break;
        }
        let d = lu.solve(&Mat::from_fn(n, 1, |i, _| r[i]));
        x += &d;
    }
    if !(err <= tol) {
        return Err(Error::SolveFailure { residual: err, reason: "residual above tolerance".into() });
    }
    Ok(((0..n).map(|i| x[(i, 0)]).collect(), err))
}

fn row_sum_norm(n: usize, triplets: &[Triplet<usize, usize, f64>]) -> f64 {
    let mut rows = vec![0.0; n];
    for t in triplets {
        rows[t.row] += t.val.abs();
    }
    rows.into_iter().fold(0.0, f64::max)
}

fn residual(n: usize, triplets: &[Triplet<usize, usize, f64>], x: &Mat<f64>, b: &[f64]) -> Vec<f64> {
    let mut r = b.to_vec();
    for t in triplets {
        r[t.row] -= t.val * x[(t.col, 0)];
    }
    debug_assert_eq!(r.len(), n);
    r
}

/// Uniform slab partition of `(t0, t_end)`.
#[derive(Debug, Clone, Copy)]
pub struct MarchConfig {
    pub degrees: Degrees,
    pub alpha: f64,
    pub t0: f64,
    pub t_end: f64,
    pub n_slabs: usize,
    /// Treat the final time level as part of `∂E_N`.
    pub final_top_neumann: bool,
    pub tolerance: f64,
}

impl MarchConfig {
    pub fn time_level(&self, k: usize) -> f64 {
        self.t0 + (self.t_end - self.t0) * k as f64 / self.n_slabs as f64
    }
}

/// Solves slab after slab, passing the top trace of each slab as bottom data
/// of the next. `observer` sees every slab and its solution; the final top
/// traces are returned.
pub fn march(
    problem: &dyn Problem,
    mesh: &SpatialMesh,
    deform: &dyn Deformation,
    cfg: &MarchConfig,
    mut observer: impl FnMut(&SpaceTimeSlab, &RefTables, &SlabSolution) -> Result<()>,
) -> Result<Vec<Vec<f64>>> {
    if cfg.n_slabs == 0 {
        return Err(Error::config("slabs", "must be positive"));
    }
    let tables = RefTables::new(cfg.degrees, mesh.dim)?;
    let builder = SlabBuilder::new(mesh, deform)?;
    let mut bottom = Vec::new();
    for k in 0..cfg.n_slabs {
        let slab = builder.build(k, cfg.time_level(k), cfg.time_level(k + 1)).map_err(|e| e.in_slab(k))?;
        if k == 0 {
            bottom = initial_trace(&slab, problem, &tables)?;
        }
        let ctx = SlabContext {
            slab: &slab,
            tables: &tables,
            problem,
            alpha: cfg.alpha,
            bottom_neumann: k == 0,
            top_neumann: cfg.final_top_neumann && k + 1 == cfg.n_slabs,
            tolerance: cfg.tolerance,
        };
        let sol = solve_slab(&ctx, &bottom).map_err(|e| e.in_slab(k))?;
        observer(&slab, &tables, &sol)?;
        bottom = sol.top;
    }
    Ok(bottom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{ExactSolution, ProblemSpec};
    use crate::geometry::{BoundaryTag, Identity, PulseDeformation};
    use crate::solver::solve_slab_monolithic;
    use crate::StPoint;

    struct Constant;
    impl ExactSolution for Constant {
        fn value(&self, _: &StPoint) -> f64 {
            1.0
        }
        fn gradient(&self, _: &StPoint) -> StPoint {
            [0.0; 3]
        }
    }

    struct Affine;
    impl ExactSolution for Affine {
        fn value(&self, z: &StPoint) -> f64 {
            1.0 + 0.5 * z[0] + 0.3 * z[1] - 0.2 * z[2]
        }
        fn gradient(&self, _: &StPoint) -> StPoint {
            [0.5, 0.3, -0.2]
        }
    }

    fn grid(n: usize, tag: BoundaryTag) -> SpatialMesh {
        SpatialMesh::uniform_grid(n, n, [-0.5, -0.5], [0.5, 0.5], |_| tag)
    }

    #[test]
    fn condensed_and_monolithic_agree() {
        let mesh = grid(2, BoundaryTag::Neumann);
        let deform = PulseDeformation::new(0.1);
        let slab = SlabBuilder::new(&mesh, &deform).unwrap().build(0, 0.0, 0.125).unwrap();
        let problem = ProblemSpec::new(2, 0.01)
            .with_velocity(|z| [-4.0 * z[2], 4.0 * z[1]])
            .with_source(|z| z[1] * z[2])
            .with_exact(Affine);
        for p in 1..=2 {
            let tables = RefTables::new(Degrees::uniform(p).unwrap(), 2).unwrap();
            let ctx = SlabContext {
                slab: &slab,
                tables: &tables,
                problem: &problem,
                alpha: 20.0,
                bottom_neumann: true,
                top_neumann: true,
                tolerance: DEFAULT_TOLERANCE,
            };
            let bottom = initial_trace(&slab, &problem, &tables).unwrap();
            let a = solve_slab(&ctx, &bottom).unwrap();
            let b = solve_slab_monolithic(&ctx, &bottom).unwrap();
            for (x, y) in a.coeffs.iter().flatten().zip(b.coeffs.iter().flatten()) {
                assert!((x - y).abs() < 1e-10, "p={p}: {x} vs {y}");
            }
            for (x, y) in a.lambda.iter().zip(&b.lambda) {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn constant_state_is_preserved_on_moving_mesh() {
        let mesh = grid(3, BoundaryTag::Neumann);
        let deform = PulseDeformation::new(0.1);
        let problem = ProblemSpec::new(2, 0.01).with_exact(Constant);
        let cfg = MarchConfig {
            degrees: Degrees::uniform(1).unwrap(),
            alpha: 20.0,
            t0: 0.0,
            t_end: 0.5,
            n_slabs: 4,
            final_top_neumann: true,
            tolerance: DEFAULT_TOLERANCE,
        };
        let mut worst = 0.0f64;
        march(&problem, &mesh, &deform, &cfg, |_, _, sol| {
            for c in &sol.coeffs {
                worst = worst.max((c[0] - 1.0).abs());
                worst = c[1..].iter().fold(worst, |m, v| m.max(v.abs()));
            }
            Ok(())
        })
        .unwrap();
        assert!(worst < 1e-11, "{worst}");
    }

    #[test]
    fn affine_solution_with_dirichlet_faces() {
        struct Bubble;
        // Vanishes on x1 = ±1/2, so homogeneous Dirichlet data are exact there.
        impl ExactSolution for Bubble {
            fn value(&self, z: &StPoint) -> f64 {
                (1.0 + z[0]) * (0.25 - z[1] * z[1])
            }
            fn gradient(&self, z: &StPoint) -> StPoint {
                [0.25 - z[1] * z[1], -2.0 * (1.0 + z[0]) * z[1], 0.0]
            }
        }
        let mesh = SpatialMesh::uniform_grid(2, 2, [-0.5, -0.5], [0.5, 0.5], |m| {
            if (m[0].abs() - 0.5).abs() < 1e-12 {
                BoundaryTag::Dirichlet
            } else {
                BoundaryTag::Neumann
            }
        });
        let nu = 0.1;
        let beta = [0.0, 0.7];
        let problem = ProblemSpec::new(2, nu)
            .with_velocity(move |_| beta)
            .with_source(move |z| 0.25 - z[1] * z[1] + 2.0 * nu * (1.0 + z[0]))
            .with_exact(Bubble);
        let cfg = MarchConfig {
            degrees: Degrees::new(1, 2).unwrap(),
            alpha: 30.0,
            t0: 0.0,
            t_end: 0.5,
            n_slabs: 2,
            final_top_neumann: true,
            tolerance: DEFAULT_TOLERANCE,
        };
        let mut worst = 0.0f64;
        march(&problem, &mesh, &Identity, &cfg, |slab, tables, sol| {
            for (e, c) in sol.coeffs.iter().enumerate() {
                let exact = crate::spaces::project_element(&|z| Bubble.value(z), &slab.elements[e], tables)?;
                worst = c.iter().zip(&exact).fold(worst, |m, (a, b)| m.max((a - b).abs()));
            }
            Ok(())
        })
        .unwrap();
        assert!(worst < 1e-10, "{worst}");
    }

    #[test]
    fn top_trace_sums_temporal_modes() {
        let tables = RefTables::new(Degrees::new(2, 1).unwrap(), 1).unwrap();
        let c = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        assert_eq!(top_trace(&c, &tables), vec![9.0, 12.0]);
    }
}
