use faer::prelude::*;
use faer::Mat;

use super::march::{top_trace, SlabContext, SlabSolution};
use crate::assembly::assemble_local;
use crate::geometry::{is_vertical, BOTTOM};
use crate::Result;

/// Solves the coupled `(u, λ)` slab system with a dense LU factorization,
/// without condensation. Intended as a reference for small problems.
pub fn solve_slab_monolithic(ctx: &SlabContext, bottom: &[Vec<f64>]) -> Result<SlabSolution> {
    let slab = ctx.slab;
    let nu = ctx.tables.n_modes();
    let nf = ctx.tables.vertical.len();
    let ne = slab.n_elements();
    let offset = ne * nu;
    let n = offset + slab.n_slots * nf;
    let mut a = Mat::<f64>::zeros(n, n);
    let mut b = Mat::<f64>::zeros(n, 1);

    for e in 0..ne {
        let sys = assemble_local(
            &slab.elements[e],
            &slab.element_flips[e],
            &ctx.roles(e),
            ctx.alpha,
            ctx.problem,
            ctx.tables,
        );
        let u0 = e * nu;
        for i in 0..nu {
            for j in 0..nu {
                a[(u0 + i, u0 + j)] += sys.a_uu[(i, j)];
            }
            let bot = &sys.faces[BOTTOM];
            b[(u0 + i, 0)] += sys.b_u[i] - (0..bottom[e].len()).map(|k| bot.a_ul[(i, k)] * bottom[e][k]).sum::<f64>();
        }
        for face in (0..slab.n_faces_per_element()).filter(|&f| is_vertical(f)) {
            let Some(slot) = slab.facet_of(e, face).0.slot else { continue };
            let fb = &sys.faces[face];
            let l0 = offset + slot * nf;
            for p in 0..nf {
                for i in 0..nu {
                    a[(u0 + i, l0 + p)] += fb.a_ul[(i, p)];
                    a[(l0 + p, u0 + i)] += fb.a_lu[(p, i)];
                }
                for q in 0..nf {
                    a[(l0 + p, l0 + q)] += fb.a_ll[(p, q)];
                }
                b[(l0 + p, 0)] += fb.b_l[p];
            }
        }
    }

    let x = a.partial_piv_lu().solve(&b);
    let r = &a * &x - &b;
    let residual = r.norm_max() / (a.norm_max() * x.norm_max() + b.norm_max()).max(f64::MIN_POSITIVE);
    let coeffs: Vec<Vec<f64>> = (0..ne).map(|e| (0..nu).map(|i| x[(e * nu + i, 0)]).collect()).collect();
    let lambda = (offset..n).map(|i| x[(i, 0)]).collect();
    let top = coeffs.iter().map(|c| top_trace(c, ctx.tables)).collect();
    Ok(SlabSolution { coeffs, lambda, bottom: bottom.to_vec(), top, residual })
}
