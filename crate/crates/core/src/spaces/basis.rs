use serde::{Deserialize, Serialize};

use super::legendre::{legendre, legendre_with_derivative};
use crate::{Error, Result, StPoint};

pub const MAX_DEGREE: usize = 4;

/// Polynomial degree in time (`p_t`) and in each spatial direction (`p_s`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Degrees {
    pub p_t: usize,
    pub p_s: usize,
}

impl Degrees {
    pub fn new(p_t: usize, p_s: usize) -> Result<Self> {
        if p_t > MAX_DEGREE || p_s > MAX_DEGREE {
            return Err(Error::UnsupportedDegree { p_t, p_s });
        }
        Ok(Degrees { p_t, p_s })
    }

    pub fn uniform(p: usize) -> Result<Self> {
        Degrees::new(p, p)
    }
}

/// Modal basis of `Q_(p_t, p_s)` on `(-1, 1)^{d+1}`:
/// mode `(i_t, i_1, .., i_d)` is `L_{i_t}(ξ_0) ∏ L_{i_k}(ξ_k)`.
///
/// Mode index is `i_t · (p_s + 1)^d + i_1 + (p_s + 1) i_2`, so the spatial
/// part of the index coincides with the horizontal facet basis index.
#[derive(Debug, Clone)]
pub struct BasisSet {
    pub degrees: Degrees,
    pub dim: usize,
    modes: Vec<[usize; 3]>,
}

impl BasisSet {
    pub fn new(degrees: Degrees, dim: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        let Degrees { p_t, p_s } = Degrees::new(degrees.p_t, degrees.p_s)?;
        let mut modes = Vec::new();
        for it in 0..=p_t {
            let j2max = if dim == 2 { p_s } else { 0 };
            for j2 in 0..=j2max {
                for j1 in 0..=p_s {
                    modes.push([it, j1, j2]);
                }
            }
        }
        Ok(BasisSet { degrees, dim, modes })
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[[usize; 3]] {
        &self.modes
    }

    /// Number of purely spatial modes, `(p_s + 1)^d`.
    pub fn spatial_len(&self) -> usize {
        (self.degrees.p_s + 1).pow(self.dim as u32)
    }

    /// Values and reference gradients of every mode at `xi`.
    pub fn eval(&self, xi: &StPoint, vals: &mut [f64], grads: &mut [StPoint]) {
        let p = self.degrees.p_t.max(self.degrees.p_s);
        let mut lv = [[0.0; MAX_DEGREE + 1]; 3];
        let mut ld = [[0.0; MAX_DEGREE + 1]; 3];
        for k in 0..=self.dim {
            legendre_with_derivative(p, xi[k], &mut lv[k], &mut ld[k]);
        }
        for (m, idx) in self.modes.iter().enumerate() {
            let mut v = 1.0;
            for k in 0..=self.dim {
                v *= lv[k][idx[k]];
            }
            vals[m] = v;
            let mut g = [0.0; 3];
            for (j, gj) in g.iter_mut().enumerate().take(self.dim + 1) {
                let mut d = 1.0;
                for k in 0..=self.dim {
                    d *= if k == j { ld[k][idx[k]] } else { lv[k][idx[k]] };
                }
                *gj = d;
            }
            grads[m] = g;
        }
    }

    pub fn values(&self, xi: &StPoint, vals: &mut [f64]) {
        let p = self.degrees.p_t.max(self.degrees.p_s);
        let mut lv = [[0.0; MAX_DEGREE + 1]; 3];
        for k in 0..=self.dim {
            legendre(p, xi[k], &mut lv[k]);
        }
        for (m, idx) in self.modes.iter().enumerate() {
            vals[m] = (0..=self.dim).map(|k| lv[k][idx[k]]).product();
        }
    }

    /// `∫_{(-1,1)^{d+1}} L_m^2`, the diagonal of the reference Gram matrix.
    pub fn reference_norm_sq(&self, m: usize) -> f64 {
        self.modes[m][..=self.dim].iter().map(|&i| 2.0 / (2 * i + 1) as f64).product()
    }
}

/// Trace basis on a facet.
///
/// Vertical facets carry degree `p_t` in time and `p_s` along the spatial
/// tangent (parameters `(τ, σ)`); bottom and top facets drop the temporal
/// direction and carry `p_s` in each spatial direction.
#[derive(Debug, Clone)]
pub struct FacetBasisSet {
    pub degrees: Degrees,
    pub dim: usize,
    pub vertical: bool,
    /// Per-axis degrees of the facet parameters.
    axes: Vec<usize>,
    modes: Vec<[usize; 2]>,
}

impl FacetBasisSet {
    pub fn vertical(degrees: Degrees, dim: usize) -> Self {
        let axes = if dim == 2 { vec![degrees.p_t, degrees.p_s] } else { vec![degrees.p_t] };
        Self::build(degrees, dim, true, axes)
    }

    pub fn horizontal(degrees: Degrees, dim: usize) -> Self {
        Self::build(degrees, dim, false, vec![degrees.p_s; dim])
    }

    fn build(degrees: Degrees, dim: usize, vertical: bool, axes: Vec<usize>) -> Self {
        let mut modes = Vec::new();
        let second = if axes.len() == 2 { axes[1] } else { 0 };
        if vertical {
            for a in 0..=axes[0] {
                for b in 0..=second {
                    modes.push([a, b]);
                }
            }
        } else {
            for b in 0..=second {
                for a in 0..=axes[0] {
                    modes.push([a, b]);
                }
            }
        }
        FacetBasisSet { degrees, dim, vertical, axes, modes }
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn n_params(&self) -> usize {
        self.axes.len()
    }

    pub fn eval(&self, params: &[f64], vals: &mut [f64]) {
        let mut lv = [[0.0; MAX_DEGREE + 1]; 2];
        for (k, &p) in self.axes.iter().enumerate() {
            legendre(p, params[k], &mut lv[k]);
        }
        for (m, idx) in self.modes.iter().enumerate() {
            vals[m] = (0..self.axes.len()).map(|k| lv[k][idx[k]]).product();
        }
    }

    /// Sign of each mode when the tangential parameter of a vertical facet is
    /// reversed, `L_b(-σ) = (-1)^b L_b(σ)`.
    pub fn flip_signs(&self) -> Vec<f64> {
        self.modes
            .iter()
            .map(|m| if self.vertical && self.axes.len() == 2 && m[1] % 2 == 1 { -1.0 } else { 1.0 })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::quadrature_for;

    #[test]
    fn mode_counts() {
        assert_eq!(BasisSet::new(Degrees::new(1, 1).unwrap(), 2).unwrap().len(), 8);
        assert_eq!(BasisSet::new(Degrees::new(2, 3).unwrap(), 2).unwrap().len(), 48);
        assert_eq!(BasisSet::new(Degrees::new(2, 3).unwrap(), 1).unwrap().len(), 12);
        let d = Degrees::new(2, 3).unwrap();
        assert_eq!(FacetBasisSet::vertical(d, 2).len(), 12);
        assert_eq!(FacetBasisSet::horizontal(d, 2).len(), 16);
        assert_eq!(FacetBasisSet::vertical(d, 1).len(), 3);
        assert_eq!(FacetBasisSet::horizontal(d, 1).len(), 4);
    }

    #[test]
    fn unsupported_degree() {
        assert!(matches!(Degrees::new(5, 1), Err(Error::UnsupportedDegree { .. })));
    }

    #[test]
    fn gram_matrix_is_diagonal() {
        let b = BasisSet::new(Degrees::new(1, 1).unwrap(), 2).unwrap();
        let rule = quadrature_for(1, 1);
        let n = b.len();
        let mut gram = vec![0.0; n * n];
        let mut v = vec![0.0; n];
        for (p, w) in rule.tensor(3) {
            b.values(&p, &mut v);
            for i in 0..n {
                for j in 0..n {
                    gram[i * n + j] += w * v[i] * v[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    assert!((gram[i * n + j] - b.reference_norm_sq(i)).abs() < 1e-14);
                } else {
                    assert!(gram[i * n + j].abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn spatial_index_matches_horizontal_facet_modes() {
        let d = Degrees::new(2, 3).unwrap();
        let b = BasisSet::new(d, 2).unwrap();
        let f = FacetBasisSet::horizontal(d, 2);
        let ns = b.spatial_len();
        for (m, idx) in b.modes().iter().enumerate() {
            assert_eq!(m / ns, idx[0]);
            assert_eq!(f.modes[m % ns], [idx[1], idx[2]]);
        }
    }

    #[test]
    fn constant_is_first_mode() {
        let b = BasisSet::new(Degrees::new(3, 2).unwrap(), 2).unwrap();
        let mut v = vec![0.0; b.len()];
        let mut g = vec![[0.0; 3]; b.len()];
        b.eval(&[0.3, -0.1, 0.9], &mut v, &mut g);
        assert_eq!(v[0], 1.0);
        assert_eq!(g[0], [0.0; 3]);
    }
}
