use std::f64::consts::PI;

use super::legendre::legendre_with_derivative;

/// One-dimensional Gauss-Legendre rule on `[-1, 1]`, used in tensor form on
/// reference elements and facets.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Tensor points and weights in `n` dimensions, first coordinate slowest.
    pub fn tensor(&self, n: usize) -> Vec<([f64; 3], f64)> {
        let q = self.len();
        let total = q.pow(n as u32);
        (0..total)
            .map(|mut idx| {
                let mut p = [0.0; 3];
                let mut w = 1.0;
                for k in (0..n).rev() {
                    let i = idx % q;
                    idx /= q;
                    p[k] = self.points[i];
                    w *= self.weights[i];
                }
                (p, w)
            })
            .collect()
    }
}

/// `n`-point Gauss-Legendre rule; exact for polynomials of degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> QuadratureRule {
    assert!(n >= 1);
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let mut v = vec![0.0; n + 1];
    let mut d = vec![0.0; n + 1];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            legendre_with_derivative(n, x, &mut v, &mut d);
            let dx = v[n] / d[n];
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        legendre_with_derivative(n, x, &mut v, &mut d);
        let w = 2.0 / ((1.0 - x * x) * d[n] * d[n]);
        points[i] = -x;
        points[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        points[n / 2] = 0.0;
    }
    QuadratureRule { points, weights }
}

/// Rule used for element and facet integrals: `max(p_t, p_s) + 2` points per
/// direction. The overshoot covers products of two basis functions times the
/// multilinear geometry factors and smooth coefficients.
pub fn quadrature_for(p_t: usize, p_s: usize) -> QuadratureRule {
    gauss_legendre(p_t.max(p_s) + 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_points_sorted() {
        for n in 1..=8 {
            let r = gauss_legendre(n);
            assert!((r.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            assert!(r.points.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn exact_for_degree_2n_minus_1() {
        for n in 1..=7 {
            let r = gauss_legendre(n);
            for k in 0..2 * n {
                let q: f64 = r.points.iter().zip(&r.weights).map(|(x, w)| w * x.powi(k as i32)).sum();
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-14, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn rule_size_by_degree() {
        assert_eq!(quadrature_for(1, 1).len(), 3);
        assert_eq!(quadrature_for(2, 3).len(), 5);
    }

    #[test]
    fn monomial_on_cube() {
        // ∫ τ² ξ⁴ η⁰ over [-1,1]^3 = (2/3)(2/5)(2)
        let r = quadrature_for(1, 1);
        let q: f64 = r.tensor(3).iter().map(|(p, w)| w * p[0].powi(2) * p[1].powi(4)).sum();
        assert!((q - 2.0 / 3.0 * 2.0 / 5.0 * 2.0).abs() < 1e-14);
    }
}
