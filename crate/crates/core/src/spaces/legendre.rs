/// Legendre polynomials `L_0..=L_n` at `x`, written to `out[..=n]`.
pub fn legendre(n: usize, x: f64, out: &mut [f64]) {
    out[0] = 1.0;
    if n >= 1 {
        out[1] = x;
    }
    for k in 1..n {
        let kf = k as f64;
        out[k + 1] = ((2.0 * kf + 1.0) * x * out[k] - kf * out[k - 1]) / (kf + 1.0);
    }
}

/// Values and first derivatives of `L_0..=L_n` at `x`.
pub fn legendre_with_derivative(n: usize, x: f64, val: &mut [f64], der: &mut [f64]) {
    legendre(n, x, val);
    der[0] = 0.0;
    if n >= 1 {
        der[1] = 1.0;
    }
    // L'_{k+1} = L'_{k-1} + (2k + 1) L_k
    for k in 1..n {
        der[k + 1] = der[k - 1] + (2.0 * k as f64 + 1.0) * val[k];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let mut v = [0.0; 5];
        let mut d = [0.0; 5];
        for &x in &[-1.0, -0.3, 0.0, 0.7, 1.0] {
            legendre_with_derivative(4, x, &mut v, &mut d);
            assert!((v[2] - 0.5 * (3.0 * x * x - 1.0)).abs() < 1e-15);
            assert!((v[3] - 0.5 * (5.0 * x * x * x - 3.0 * x)).abs() < 1e-15);
            assert!((v[4] - (35.0 * x.powi(4) - 30.0 * x * x + 3.0) / 8.0).abs() < 1e-14);
            assert!((d[3] - 0.5 * (15.0 * x * x - 3.0)).abs() < 1e-14);
            assert!((d[4] - (140.0 * x.powi(3) - 60.0 * x) / 8.0).abs() < 1e-13);
        }
    }

    #[test]
    fn endpoint_values() {
        let mut v = [0.0; 5];
        legendre(4, 1.0, &mut v);
        assert!(v.iter().all(|&x| (x - 1.0).abs() < 1e-15));
        legendre(4, -1.0, &mut v);
        for (k, x) in v.iter().enumerate() {
            assert!((x - if k % 2 == 0 { 1.0 } else { -1.0 }).abs() < 1e-15);
        }
    }
}
