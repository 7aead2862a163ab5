use crate::StPoint;

/// Result of evaluating an element map at a reference point.
#[derive(Debug, Clone, Copy)]
pub struct Mapping {
    /// Physical space-time point `(t, x)`.
    pub point: StPoint,
    /// `jac[i][j] = ∂z_i / ∂ξ_j`.
    pub jac: [[f64; 3]; 3],
    pub det: f64,
    /// Inverse Jacobian, `inv[j][i] = ∂ξ_j / ∂z_i`.
    pub inv: [[f64; 3]; 3],
}

impl Mapping {
    /// Physical space-time gradient from a reference gradient, `J^{-T} ∇̂`.
    #[inline]
    pub fn gradient(&self, ref_grad: &StPoint, dim: usize) -> StPoint {
        let mut g = [0.0; 3];
        for (i, gi) in g.iter_mut().enumerate().take(dim) {
            for j in 0..dim {
                *gi += self.inv[j][i] * ref_grad[j];
            }
        }
        g
    }

    /// Nanson's formula: `n ds = det J · J^{-T} n̂ dŝ` for the reference
    /// normal `side · e_axis`. Returns the unit outward normal and the surface
    /// scaling `ds / dŝ`.
    pub fn face_normal(&self, axis: usize, side: f64, dim: usize) -> (StPoint, f64) {
        let mut n = [0.0; 3];
        for (i, ni) in n.iter_mut().enumerate().take(dim) {
            *ni = self.det * side * self.inv[axis][i];
        }
        let len = n[..dim].iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in n.iter_mut().take(dim) {
            *v /= len;
        }
        (n, len)
    }
}

/// Multilinear space-time element: the image of `(-1, 1)^{d+1}` under the
/// composition of the affine scaling to a `Δt × h_1 × .. × h_d` brick and
/// the element-shape diffeomorphism, realized together as one multilinear map.
///
/// Node `i` sits at the reference corner whose coordinate `ξ_k` is `+1` when
/// bit `k` of `i` is set (bit 0 is time).
#[derive(Debug, Clone)]
pub struct ElementGeometry {
    pub id: usize,
    pub dim: usize,
    pub nodes: [StPoint; 8],
    /// Averaged physical edge length per spatial direction at slab midtime.
    pub edge_lengths: [f64; 2],
    /// Circumradius of the spatial brick `h_1 × .. × h_d`.
    pub h: f64,
    /// Inradius of the same brick.
    pub rho: f64,
    pub dt: f64,
}

impl ElementGeometry {
    /// Builds an element from its spatial corner positions at `t0` and `t1`,
    /// both in tensor-corner order.
    pub fn new(dim: usize, t0: f64, t1: f64, bottom: &[[f64; 2]], top: &[[f64; 2]]) -> Self {
        let dt = t1 - t0;
        let nc = 1 << dim;
        let mut nodes = [[0.0; 3]; 8];
        for c in 0..nc {
            for (lvl, (t, xs)) in [(t0, bottom), (t1, top)].into_iter().enumerate() {
                let node = &mut nodes[lvl | (c << 1)];
                node[0] = t;
                node[1..=dim].copy_from_slice(&xs[c][..dim]);
            }
        }
        let mid: Vec<[f64; 2]> =
            (0..nc).map(|c| [0.5 * (bottom[c][0] + top[c][0]), 0.5 * (bottom[c][1] + top[c][1])]).collect();
        let mut edge_lengths = [0.0; 2];
        for (k, h) in edge_lengths.iter_mut().enumerate().take(dim) {
            let bit = 1 << k;
            let mut total = 0.0;
            let mut count = 0;
            for c in (0..nc).filter(|c| c & bit == 0) {
                let (a, b) = (mid[c], mid[c | bit]);
                total += ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
                count += 1;
            }
            *h = total / count as f64;
        }
        let hs = &edge_lengths[..dim];
        let h = 0.5 * hs.iter().map(|v| v * v).sum::<f64>().sqrt();
        let rho = 0.5 * hs.iter().cloned().fold(f64::INFINITY, f64::min);
        ElementGeometry { id: 0, dim, nodes, edge_lengths, h, rho, dt }
    }

    pub fn n_nodes(&self) -> usize {
        2 << self.dim
    }

    pub fn st_dim(&self) -> usize {
        self.dim + 1
    }

    pub fn t0(&self) -> f64 {
        self.nodes[0][0]
    }

    /// Evaluates the multilinear map, its Jacobian (by analytic
    /// differentiation of the shape functions) and the inverse Jacobian.
    pub fn map(&self, xi: &StPoint) -> Mapping {
        let dd = self.st_dim();
        let mut point = [0.0; 3];
        let mut jac = [[0.0; 3]; 3];
        for (i, node) in self.nodes.iter().enumerate().take(self.n_nodes()) {
            let mut f = [0.0; 3];
            for (k, fk) in f.iter_mut().enumerate().take(dd) {
                let s = if i >> k & 1 == 1 { 1.0 } else { -1.0 };
                *fk = 0.5 * (1.0 + s * xi[k]);
            }
            let shape: f64 = f[..dd].iter().product();
            for j in 0..dd {
                let s = if i >> j & 1 == 1 { 1.0 } else { -1.0 };
                let mut d = 0.5 * s;
                for (k, fk) in f.iter().enumerate().take(dd) {
                    if k != j {
                        d *= fk;
                    }
                }
                for r in 0..dd {
                    jac[r][j] += node[r] * d;
                }
            }
            for r in 0..dd {
                point[r] += node[r] * shape;
            }
        }
        let (det, inv) = invert(&jac, dd);
        Mapping { point, jac, det, inv }
    }

    /// Volume `Δt ∏ h_i` of the intermediate tensor brick.
    pub fn brick_volume(&self) -> f64 {
        self.dt * self.edge_lengths[..self.dim].iter().product::<f64>()
    }

    /// Space-time centroid of the nodes.
    pub fn node_centroid(&self) -> StPoint {
        let n = self.n_nodes();
        let mut c = [0.0; 3];
        for node in &self.nodes[..n] {
            for k in 0..3 {
                c[k] += node[k] / n as f64;
            }
        }
        c
    }
}

fn invert(a: &[[f64; 3]; 3], n: usize) -> (f64, [[f64; 3]; 3]) {
    let mut inv = [[0.0; 3]; 3];
    match n {
        2 => {
            let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
            inv[0][0] = a[1][1] / det;
            inv[0][1] = -a[0][1] / det;
            inv[1][0] = -a[1][0] / det;
            inv[1][1] = a[0][0] / det;
            (det, inv)
        }
        _ => {
            let c00 = a[1][1] * a[2][2] - a[1][2] * a[2][1];
            let c01 = a[1][2] * a[2][0] - a[1][0] * a[2][2];
            let c02 = a[1][0] * a[2][1] - a[1][1] * a[2][0];
            let det = a[0][0] * c00 + a[0][1] * c01 + a[0][2] * c02;
            inv[0][0] = c00 / det;
            inv[1][0] = c01 / det;
            inv[2][0] = c02 / det;
            inv[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
            inv[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
            inv[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
            inv[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
            inv[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
            inv[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
            (det, inv)
        }
    }
}
