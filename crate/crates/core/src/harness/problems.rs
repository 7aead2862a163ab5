use crate::assembly::{ExactSolution, ProblemSpec};
use crate::geometry::{BoundaryTag, Deformation, Identity, PulseDeformation, SpatialMesh};
use crate::{Error, Result, StPoint};

/// Gaussian pulse of width `σ` rotating with `β̄ = (-4 x_2, 4 x_1)` and
/// spreading under diffusion `ν`.
#[derive(Debug, Clone, Copy)]
pub struct RotatingPulse {
    pub nu: f64,
    pub sigma: f64,
    pub center: [f64; 2],
}

impl RotatingPulse {
    pub fn new(nu: f64) -> Self {
        RotatingPulse { nu, sigma: 0.1, center: [-0.2, 0.1] }
    }

    fn parts(&self, z: &StPoint) -> (f64, f64, f64, f64, f64, f64) {
        let (t, x1, x2) = (z[0], z[1], z[2]);
        let (s, c) = (4.0 * t).sin_cos();
        let r1 = x1 * c + x2 * s - self.center[0];
        let r2 = -x1 * s + x2 * c - self.center[1];
        let a = self.sigma * self.sigma + 2.0 * self.nu * t;
        let u = self.sigma * self.sigma / a * (-(r1 * r1 + r2 * r2) / (2.0 * a)).exp();
        (u, r1, r2, a, s, c)
    }
}

impl ExactSolution for RotatingPulse {
    fn value(&self, z: &StPoint) -> f64 {
        self.parts(z).0
    }

    fn gradient(&self, z: &StPoint) -> StPoint {
        let (u, r1, r2, a, s, c) = self.parts(z);
        let k = -u / a;
        let dx1 = k * (r1 * c - r2 * s);
        let dx2 = k * (r1 * s + r2 * c);
        // d r1/dt = 4 (r2 + c2), d r2/dt = -4 (r1 + c1)
        let dr1 = 4.0 * (r2 + self.center[1]);
        let dr2 = -4.0 * (r1 + self.center[0]);
        let rr = r1 * r1 + r2 * r2;
        let dt = u * (-2.0 * self.nu / a + self.nu * rr / (a * a)) + k * (r1 * dr1 + r2 * dr2);
        [dt, dx1, dx2]
    }
}

/// Constant state.
#[derive(Debug, Clone, Copy)]
pub struct Constant(pub f64);

impl ExactSolution for Constant {
    fn value(&self, _: &StPoint) -> f64 {
        self.0
    }

    fn gradient(&self, _: &StPoint) -> StPoint {
        [0.0; 3]
    }
}

/// `u = 1 + t/2 + 0.3 x_1 - 0.2 x_2 - 0.1 x_1² + 0.2 t x_2 + 0.15 x_1 x_2 - 0.05 t²`.
/// Of total degree two, so it lies in the discrete space for `p_t, p_s ≥ 2`
/// on affine space-time elements.
#[derive(Debug, Clone, Copy)]
pub struct PolynomialSolution;

impl PolynomialSolution {
    /// `-Δu`.
    pub fn neg_laplacian(_: &StPoint) -> f64 {
        0.2
    }
}

impl ExactSolution for PolynomialSolution {
    fn value(&self, z: &StPoint) -> f64 {
        let (t, x1, x2) = (z[0], z[1], z[2]);
        1.0 + 0.5 * t + 0.3 * x1 - 0.2 * x2 - 0.1 * x1 * x1 + 0.2 * t * x2 + 0.15 * x1 * x2 - 0.05 * t * t
    }

    fn gradient(&self, z: &StPoint) -> StPoint {
        let (t, x1, x2) = (z[0], z[1], z[2]);
        [0.5 + 0.2 * x2 - 0.1 * t, 0.3 - 0.2 * x1 + 0.15 * x2, -0.2 + 0.2 * t + 0.15 * x1]
    }
}

/// Rigid translation `x = x0 + t v`, which keeps space-time elements affine.
#[derive(Debug, Clone, Copy)]
pub struct Translation(pub [f64; 2]);

impl Deformation for Translation {
    fn apply(&self, t: f64, x0: [f64; 2]) -> [f64; 2] {
        [x0[0] + t * self.0[0], x0[1] + t * self.0[1]]
    }
}

/// A built-in test case: problem data, spatial domain and mesh motion.
pub struct Benchmark {
    pub name: &'static str,
    pub problem: ProblemSpec,
    pub deformation: Box<dyn Deformation>,
    pub lower: [f64; 2],
    pub upper: [f64; 2],
    pub t_end: f64,
}

impl Benchmark {
    pub fn mesh(&self, dim: usize, nx: usize, ny: usize) -> Result<SpatialMesh> {
        match dim {
            1 => Ok(SpatialMesh::uniform_interval(nx, self.lower[0], self.upper[0], [BoundaryTag::Neumann; 2])),
            2 => Ok(SpatialMesh::uniform_grid(nx, ny, self.lower, self.upper, |_| BoundaryTag::Neumann)),
            d => Err(Error::UnsupportedDimension(d)),
        }
    }
}

pub const BENCHMARKS: [&str; 3] = ["rotating-pulse", "free-stream", "poly-exact"];

/// Looks up a built-in benchmark. `amplitude` overrides the default mesh
/// deformation amplitude where one applies.
pub fn benchmark(name: &str, dim: usize, nu: f64, amplitude: Option<f64>) -> Result<Benchmark> {
    if !(1..=2).contains(&dim) {
        return Err(Error::UnsupportedDimension(dim));
    }
    let square = ([-0.5, -0.5], [0.5, 0.5]);
    match name {
        "rotating-pulse" => {
            if dim != 2 {
                return Err(Error::UnsupportedDimension(dim));
            }
            let problem =
                ProblemSpec::new(2, nu).with_velocity(|z| [-4.0 * z[2], 4.0 * z[1]]).with_exact(RotatingPulse::new(nu));
            Ok(Benchmark {
                name: "rotating-pulse",
                problem,
                deformation: Box::new(PulseDeformation::new(amplitude.unwrap_or(0.1))),
                lower: square.0,
                upper: square.1,
                t_end: 1.0,
            })
        }
        "free-stream" => {
            let problem = ProblemSpec::new(dim, nu)
                .with_velocity(move |z| if dim == 2 { [-4.0 * z[2], 4.0 * z[1]] } else { [0.0, 0.0] })
                .with_exact(Constant(1.0));
            Ok(Benchmark {
                name: "free-stream",
                problem,
                deformation: Box::new(PulseDeformation::new(amplitude.unwrap_or(0.1))),
                lower: square.0,
                upper: square.1,
                t_end: 1.0,
            })
        }
        "poly-exact" => {
            let beta = [0.5, -0.3];
            let problem = ProblemSpec::new(dim, nu)
                .with_velocity(move |_| beta)
                .with_source(move |z| {
                    let g = PolynomialSolution.gradient(z);
                    let adv: f64 = (0..dim).map(|k| beta[k] * g[k + 1]).sum();
                    g[0] + adv + nu * PolynomialSolution::neg_laplacian(z)
                })
                .with_exact(PolynomialSolution);
            let v = amplitude.unwrap_or(0.1);
            let deformation: Box<dyn Deformation> =
                if v == 0.0 { Box::new(Identity) } else { Box::new(Translation([v, -0.5 * v])) };
            Ok(Benchmark { name: "poly-exact", problem, deformation, lower: square.0, upper: square.1, t_end: 0.5 })
        }
        other => Err(Error::UnknownProblem(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::Problem;

    fn fd_gradient(u: &dyn ExactSolution, z: &StPoint) -> StPoint {
        let h = 1e-6;
        let mut g = [0.0; 3];
        for k in 0..3 {
            let (mut a, mut b) = (*z, *z);
            a[k] += h;
            b[k] -= h;
            g[k] = (u.value(&a) - u.value(&b)) / (2.0 * h);
        }
        g
    }

    #[test]
    fn pulse_gradient_matches_differences() {
        let u = RotatingPulse::new(1e-2);
        for z in [[0.0, -0.2, 0.1], [0.3, 0.05, -0.1], [0.9, -0.3, 0.25]] {
            let g = u.gradient(&z);
            let f = fd_gradient(&u, &z);
            for k in 0..3 {
                assert!((g[k] - f[k]).abs() < 1e-6 * (1.0 + f[k].abs()), "{z:?} {k}: {} vs {}", g[k], f[k]);
            }
        }
    }

    #[test]
    fn pulse_solves_the_equation() {
        let nu = 1e-2;
        let u = RotatingPulse::new(nu);
        let h = 1e-4;
        for z in [[0.2, -0.15, 0.05], [0.6, 0.1, -0.2]] {
            let g = u.gradient(&z);
            let mut lap = 0.0;
            for k in 1..3 {
                let (mut a, mut b) = (z, z);
                a[k] += h;
                b[k] -= h;
                lap += (u.value(&a) - 2.0 * u.value(&z) + u.value(&b)) / (h * h);
            }
            let res = g[0] - 4.0 * z[2] * g[1] + 4.0 * z[1] * g[2] - nu * lap;
            assert!(res.abs() < 1e-5, "{res}");
        }
    }

    #[test]
    fn pulse_peak_at_initial_center() {
        let u = RotatingPulse::new(1e-6);
        assert!((u.value(&[0.0, -0.2, 0.1]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn polynomial_source_balances() {
        let b = benchmark("poly-exact", 2, 0.1, None).unwrap();
        let z = [0.3, 0.2, -0.1];
        let u = PolynomialSolution;
        let g = fd_gradient(&u, &z);
        let lap = -0.2;
        let expect = g[0] + 0.5 * g[1] - 0.3 * g[2] - 0.1 * lap;
        assert!((b.problem.source(&z) - expect).abs() < 1e-8);
    }

    #[test]
    fn unknown_names_are_rejected() {
        assert!(matches!(benchmark("nope", 2, 0.0, None), Err(Error::UnknownProblem(_))));
        assert!(matches!(benchmark("rotating-pulse", 1, 0.0, None), Err(Error::UnsupportedDimension(1))));
    }
}
