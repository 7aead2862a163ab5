use crate::StPoint;

/// Closed-form solution with its space-time gradient `(∂_t u, ∇u)`.
pub trait ExactSolution: Send + Sync {
    fn value(&self, z: &StPoint) -> f64;
    fn gradient(&self, z: &StPoint) -> StPoint;
}

/// Scalar advection-diffusion problem
/// `∂_t u + ∇·(β̄ u) - ν Δu = f` written in space-time form with
/// `β = (1, β̄)`.
///
/// Boundary data `g` is prescribed on the Neumann/inflow part of the
/// space-time boundary through `-ζ u β·n + ν ∇u·n̄ = g`, where `ζ` selects
/// inflow points (`β·n < 0`). On the initial time level this reduces to
/// `u = g`. Dirichlet boundaries are homogeneous.
pub trait Problem: Send + Sync {
    fn dim(&self) -> usize;

    fn diffusion(&self) -> f64;

    /// Spatial advective velocity `β̄(t, x)`.
    fn velocity(&self, z: &StPoint) -> [f64; 2];

    fn source(&self, z: &StPoint) -> f64;

    fn exact(&self) -> Option<&dyn ExactSolution> {
        None
    }

    /// `g(z)` at a boundary point with unit outward space-time normal `n`.
    /// Derived from the exact solution when one is available, zero otherwise.
    fn boundary_data(&self, z: &StPoint, n: &StPoint) -> f64 {
        match self.exact() {
            Some(u) => neumann_from_exact(self.dim(), self.diffusion(), self.velocity(z), u, z, n),
            None => 0.0,
        }
    }

    /// Space-time velocity `β = (1, β̄)`.
    fn st_velocity(&self, z: &StPoint) -> StPoint {
        let b = self.velocity(z);
        let mut beta = [1.0, 0.0, 0.0];
        beta[1..=self.dim()].copy_from_slice(&b[..self.dim()]);
        beta
    }

    /// `∇·β̄`, by central differences unless overridden.
    fn velocity_divergence(&self, z: &StPoint) -> f64 {
        let h = 1e-6;
        (0..self.dim())
            .map(|k| {
                let mut zp = *z;
                let mut zm = *z;
                zp[k + 1] += h;
                zm[k + 1] -= h;
                (self.velocity(&zp)[k] - self.velocity(&zm)[k]) / (2.0 * h)
            })
            .sum()
    }
}

/// `g = -ζ u β·n + ν ∇u·n̄` evaluated from an exact solution.
pub fn neumann_from_exact(
    dim: usize,
    nu: f64,
    velocity: [f64; 2],
    u: &dyn ExactSolution,
    z: &StPoint,
    n: &StPoint,
) -> f64 {
    let bn = n[0] + (0..dim).map(|k| velocity[k] * n[k + 1]).sum::<f64>();
    let grad = u.gradient(z);
    let flux = nu * (0..dim).map(|k| grad[k + 1] * n[k + 1]).sum::<f64>();
    if bn < 0.0 {
        -u.value(z) * bn + flux
    } else {
        flux
    }
}

type ScalarFn = Box<dyn Fn(&StPoint) -> f64 + Send + Sync>;
type VectorFn = Box<dyn Fn(&StPoint) -> [f64; 2] + Send + Sync>;
type BoundaryFn = Box<dyn Fn(&StPoint, &StPoint) -> f64 + Send + Sync>;

/// A problem assembled from closures.
pub struct ProblemSpec {
    pub dim: usize,
    pub nu: f64,
    pub velocity: VectorFn,
    pub source: ScalarFn,
    /// Explicit `g`; falls back to the exact solution, then to zero.
    pub boundary: Option<BoundaryFn>,
    pub exact: Option<Box<dyn ExactSolution>>,
}

impl ProblemSpec {
    pub fn new(dim: usize, nu: f64) -> Self {
        ProblemSpec {
            dim,
            nu,
            velocity: Box::new(|_| [0.0, 0.0]),
            source: Box::new(|_| 0.0),
            boundary: None,
            exact: None,
        }
    }

    pub fn with_velocity(mut self, f: impl Fn(&StPoint) -> [f64; 2] + Send + Sync + 'static) -> Self {
        self.velocity = Box::new(f);
        self
    }

    pub fn with_source(mut self, f: impl Fn(&StPoint) -> f64 + Send + Sync + 'static) -> Self {
        self.source = Box::new(f);
        self
    }

    pub fn with_boundary(mut self, g: impl Fn(&StPoint, &StPoint) -> f64 + Send + Sync + 'static) -> Self {
        self.boundary = Some(Box::new(g));
        self
    }

    pub fn with_exact(mut self, u: impl ExactSolution + 'static) -> Self {
        self.exact = Some(Box::new(u));
        self
    }
}

impl Problem for ProblemSpec {
    fn dim(&self) -> usize {
        self.dim
    }

    fn diffusion(&self) -> f64 {
        self.nu
    }

    fn velocity(&self, z: &StPoint) -> [f64; 2] {
        (self.velocity)(z)
    }

    fn source(&self, z: &StPoint) -> f64 {
        (self.source)(z)
    }

    fn exact(&self) -> Option<&dyn ExactSolution> {
        self.exact.as_deref()
    }

    fn boundary_data(&self, z: &StPoint, n: &StPoint) -> f64 {
        if let Some(g) = &self.boundary {
            return g(z, n);
        }
        match self.exact() {
            Some(u) => neumann_from_exact(self.dim, self.nu, self.velocity(z), u, z, n),
            None => 0.0,
        }
    }
}
