use faer::prelude::*;
use faer::{Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::constants::{generalized_eigenvalues, generalized_max_eigenvalue};
use super::operator::{quadratic, NormKind, SlabOperator};

pub const DEFAULT_SEED: u64 = 42;

/// Extremal ratio over random samples, with the sharp value from the
/// corresponding eigenproblem when it is well posed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleReport {
    pub samples: usize,
    pub sampled: f64,
    pub sharp: Option<f64>,
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn sym(a: &Mat<f64>) -> Mat<f64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| 0.5 * (a[(i, j)] + a[(j, i)]))
}

/// `min a_h(x, x) / ⦀x⦀²_v` over random discrete pairs.
pub fn check_coercivity(op: &SlabOperator, samples: usize, seed: u64) -> SampleReport {
    let a = op.form();
    let nv = op.norm_matrix(NormKind::V);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lo = f64::INFINITY;
    for _ in 0..samples {
        let x = random_vector(&mut rng, op.dim());
        lo = lo.min(quadratic(&a, &x, &x) / quadratic(&nv, &x, &x));
    }
    let sharp = generalized_eigenvalues(&sym(&a), &nv).ok().and_then(|v| v.first().copied());
    SampleReport { samples, sampled: lo, sharp }
}

/// `c_p = max ‖v‖_E / (Σ‖∇̄v‖²_K + Σ h_K⁻¹‖v - μ‖²_Q)^{1/2}`. The operator
/// must be assembled with `ν = 1`.
pub fn check_poincare(op: &SlabOperator, samples: usize, seed: u64) -> SampleReport {
    let num = &op.components[0];
    let den = &op.components[3] + &op.components[4];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hi = 0.0f64;
    for _ in 0..samples {
        let x = random_vector(&mut rng, op.dim());
        hi = hi.max(quadratic(num, &x, &x) / quadratic(&den, &x, &x));
    }
    let sharp = generalized_max_eigenvalue(num, &den).ok().map(f64::sqrt);
    SampleReport { samples, sampled: hi.sqrt(), sharp }
}

/// `c_B = max |a_h(x, y)| / (⦀x⦀_{s,⋆} ⦀y⦀_s)`.
pub fn check_boundedness(op: &SlabOperator, samples: usize, seed: u64) -> SampleReport {
    let a = op.form();
    let ns = op.norm_matrix(NormKind::S);
    let nstar = op.norm_matrix(NormKind::SStar);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hi = 0.0f64;
    for _ in 0..samples {
        let x = random_vector(&mut rng, op.dim());
        let y = random_vector(&mut rng, op.dim());
        let r = quadratic(&a, &y, &x).abs() / (quadratic(&nstar, &x, &x) * quadratic(&ns, &y, &y)).sqrt();
        hi = hi.max(r);
    }
    let sharp = ns.llt(Side::Lower).ok().and_then(|llt| {
        let b = a.transpose() * llt.solve(&a);
        generalized_max_eigenvalue(&sym(&b), &nstar).ok().map(f64::sqrt)
    });
    SampleReport { samples, sampled: hi, sharp }
}

/// Test function `y = c₂ x + (z, 0)` with `z` the element projection of the
/// weighted time derivative of the element part of `x`.
pub fn infsup_test_function(op: &SlabOperator, x: &[f64], c2: f64) -> Vec<f64> {
    let nu = op.n_modes;
    let mut y: Vec<f64> = x.iter().map(|v| c2 * v).collect();
    for (e, t) in op.time_lift.iter().enumerate() {
        let w = &x[e * nu..(e + 1) * nu];
        for i in 0..nu {
            y[e * nu + i] += (0..nu).map(|j| t[(i, j)] * w[j]).sum::<f64>();
        }
    }
    y
}

/// `min a_h(x, y(x)) / (⦀x⦀_s ⦀y(x)⦀_s)` for the explicit test function.
pub fn check_infsup(op: &SlabOperator, samples: usize, seed: u64, c2: f64) -> SampleReport {
    let a = op.form();
    let ns = op.norm_matrix(NormKind::S);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lo = f64::INFINITY;
    for _ in 0..samples {
        let x = random_vector(&mut rng, op.dim());
        let y = infsup_test_function(op, &x, c2);
        lo = lo.min(quadratic(&a, &y, &x) / (quadratic(&ns, &x, &x) * quadratic(&ns, &y, &y)).sqrt());
    }
    SampleReport { samples, sampled: lo, sharp: None }
}
