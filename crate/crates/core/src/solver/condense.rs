use faer::linalg::matmul::matmul;
use faer::prelude::*;
use faer::{Accum, Mat, Par};

use crate::assembly::LocalSystem;
use crate::geometry::{is_vertical, SpaceTimeSlab, BOTTOM};
use crate::{Error, Result};

/// Largest tolerated pivot ratio of the local element block.
const MAX_CONDITION: f64 = 1e14;

/// Element system after eliminating `u_K`:
/// `S = A_λλ - A_λu A_uu⁻¹ A_uλ`, `r = b_λ - A_λu A_uu⁻¹ b_u`,
/// with `u_K = y - Z λ_K` recovering the element unknowns.
#[derive(Debug, Clone)]
pub struct CondensedElement {
    pub element: usize,
    /// Global slots of the condensed facets, in local order.
    pub slots: Vec<usize>,
    pub faces: Vec<usize>,
    pub s: Mat<f64>,
    pub r: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Mat<f64>,
}

/// Condenses the element contribution of `e`. Bottom traces are known data
/// and move to the right-hand side; Dirichlet facets carry zero traces.
pub fn condense(slab: &SpaceTimeSlab, e: usize, mut sys: LocalSystem, bottom: &[f64]) -> Result<CondensedElement> {
    let nu = sys.a_uu.nrows();
    let bot = &sys.faces[BOTTOM];
    for (i, b) in sys.b_u.iter_mut().enumerate() {
        *b -= (0..bottom.len()).map(|a| bot.a_ul[(i, a)] * bottom[a]).sum::<f64>();
    }

    let mut faces = Vec::new();
    let mut slots = Vec::new();
    for face in (0..slab.n_faces_per_element()).filter(|&f| is_vertical(f)) {
        if let Some(slot) = slab.facet_of(e, face).0.slot {
            faces.push(face);
            slots.push(slot);
        }
    }
    let nf: Vec<usize> = faces.iter().map(|&f| sys.faces[f].a_ll.nrows()).collect();
    let nl: usize = nf.iter().sum();

    let mut a_ul = Mat::<f64>::zeros(nu, nl);
    let mut a_lu = Mat::<f64>::zeros(nl, nu);
    let mut s = Mat::<f64>::zeros(nl, nl);
    let mut r = vec![0.0; nl];
    let mut off = 0;
    for (k, &face) in faces.iter().enumerate() {
        let fb = &sys.faces[face];
        let n = nf[k];
        a_ul.as_mut().submatrix_mut(0, off, nu, n).copy_from(&fb.a_ul);
        a_lu.as_mut().submatrix_mut(off, 0, n, nu).copy_from(&fb.a_lu);
        s.as_mut().submatrix_mut(off, off, n, n).copy_from(&fb.a_ll);
        r[off..off + n].copy_from_slice(&fb.b_l);
        off += n;
    }

    let lu = sys.a_uu.partial_piv_lu();
    let diag = lu.U().diagonal();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..nu {
        let d = diag[i].abs();
        lo = lo.min(d);
        hi = hi.max(d);
    }
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::SingularLocalBlock { element: e, condition });
    }

    let b = Mat::from_fn(nu, 1, |i, _| sys.b_u[i]);
    let y = lu.solve(&b);
    let z = lu.solve(&a_ul);
    matmul(s.as_mut(), Accum::Add, a_lu.as_ref(), z.as_ref(), -1.0, Par::Seq);
    for (i, ri) in r.iter_mut().enumerate() {
        *ri -= (0..nu).map(|j| a_lu[(i, j)] * y[(j, 0)]).sum::<f64>();
    }
    Ok(CondensedElement { element: e, slots, faces, s, r, y: (0..nu).map(|i| y[(i, 0)]).collect(), z })
}

impl CondensedElement {
    /// `u_K = y - Z λ_K` with `λ_K` gathered from the global trace vector.
    pub fn recover(&self, lambda: &[f64], facet_modes: usize) -> Vec<f64> {
        let local: Vec<f64> =
            self.slots.iter().flat_map(|&s| lambda[s * facet_modes..(s + 1) * facet_modes].iter().copied()).collect();
        self.y
            .iter()
            .enumerate()
            .map(|(i, &yi)| yi - local.iter().enumerate().map(|(a, &l)| self.z[(i, a)] * l).sum::<f64>())
            .collect()
    }
}
