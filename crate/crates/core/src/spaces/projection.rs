use faer::prelude::*;
use faer::{Mat, Side};

use super::basis::{BasisSet, FacetBasisSet};
use super::tables::RefTables;
use crate::geometry::ElementGeometry;
use crate::{Error, Result, StPoint};

/// Element mass matrix `∫_K φ_i φ_j` with the physical volume measure.
pub fn element_mass(elem: &ElementGeometry, tables: &RefTables) -> Mat<f64> {
    let n = tables.n_modes();
    let vol = &tables.volume;
    let mut m = Mat::<f64>::zeros(n, n);
    for (q, xi) in vol.points.iter().enumerate() {
        let w = vol.weights[q] * elem.map(xi).det;
        let phi = &vol.phi[q * n..(q + 1) * n];
        for j in 0..n {
            let wj = w * phi[j];
            for i in 0..n {
                m[(i, j)] += wj * phi[i];
            }
        }
    }
    m
}

/// Element L² projection: solves `M c = (f, φ_i)_K`, so that
/// `∫_K (f - P f) v = 0` for every `v` in the element space.
pub fn project_element(f: &dyn Fn(&StPoint) -> f64, elem: &ElementGeometry, tables: &RefTables) -> Result<Vec<f64>> {
    let n = tables.n_modes();
    let vol = &tables.volume;
    let mut rhs = Col::<f64>::zeros(n);
    for (q, xi) in vol.points.iter().enumerate() {
        let map = elem.map(xi);
        let w = vol.weights[q] * map.det * f(&map.point);
        for i in 0..n {
            rhs[i] += w * vol.phi[q * n + i];
        }
    }
    let llt = element_mass(elem, tables).llt(Side::Lower).map_err(|_| Error::SingularMass { element: elem.id })?;
    let c = llt.solve(&rhs);
    Ok((0..n).map(|i| c[i]).collect())
}

pub fn evaluate_element(coeffs: &[f64], basis: &BasisSet, xi: &StPoint) -> f64 {
    let mut v = vec![0.0; basis.len()];
    basis.values(xi, &mut v);
    v.iter().zip(coeffs).map(|(a, b)| a * b).sum()
}

/// Facet mass matrix on local `face` of `elem` with the physical surface
/// measure, in the facet orientation given by `flip`.
pub fn facet_mass(elem: &ElementGeometry, face: usize, flip: bool, tables: &RefTables) -> Mat<f64> {
    let ft = &tables.faces[face];
    let nf = ft.n_facet_modes;
    let mut m = Mat::<f64>::zeros(nf, nf);
    let mut psi = vec![0.0; nf];
    for (q, xi) in ft.points.iter().enumerate() {
        let map = elem.map(xi);
        let (_, ds) = map.face_normal(ft.axis, ft.side, elem.dim + 1);
        ft.psi_at(q, flip, &mut psi);
        let w = ft.weights[q] * ds;
        for j in 0..nf {
            for i in 0..nf {
                m[(i, j)] += w * psi[i] * psi[j];
            }
        }
    }
    m
}

/// Facet L² projection of `g(z, n)` (point and unit outward normal of
/// `elem`) onto the trace space of `face`.
pub fn project_facet(
    g: &dyn Fn(&StPoint, &StPoint) -> f64,
    elem: &ElementGeometry,
    face: usize,
    flip: bool,
    tables: &RefTables,
) -> Result<Vec<f64>> {
    let ft = &tables.faces[face];
    let nf = ft.n_facet_modes;
    let mut rhs = Col::<f64>::zeros(nf);
    let mut psi = vec![0.0; nf];
    for (q, xi) in ft.points.iter().enumerate() {
        let map = elem.map(xi);
        let (n, ds) = map.face_normal(ft.axis, ft.side, elem.dim + 1);
        ft.psi_at(q, flip, &mut psi);
        let w = ft.weights[q] * ds * g(&map.point, &n);
        for a in 0..nf {
            rhs[a] += w * psi[a];
        }
    }
    let llt =
        facet_mass(elem, face, flip, tables).llt(Side::Lower).map_err(|_| Error::SingularMass { element: elem.id })?;
    let c = llt.solve(&rhs);
    Ok((0..nf).map(|i| c[i]).collect())
}

pub fn evaluate_facet(coeffs: &[f64], basis: &FacetBasisSet, params: &[f64]) -> f64 {
    let mut v = vec![0.0; basis.len()];
    basis.eval(params, &mut v);
    v.iter().zip(coeffs).map(|(a, b)| a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_slab, BoundaryTag, Identity, PulseDeformation, SpatialMesh};
    use crate::spaces::Degrees;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn deformed_element() -> ElementGeometry {
        let m = SpatialMesh::uniform_grid(4, 4, [-0.5, -0.5], [0.5, 0.5], |_| BoundaryTag::Neumann);
        build_slab(&m, &PulseDeformation::new(0.1), 0.2, 0.25).unwrap().elements[5].clone()
    }

    fn affine_element() -> ElementGeometry {
        let m = SpatialMesh::uniform_grid(2, 2, [0.0, 0.0], [1.0, 1.0], |_| BoundaryTag::Neumann);
        build_slab(&m, &Identity, 0.5, 0.5).unwrap().elements[3].clone()
    }

    #[test]
    fn constants_are_reproduced() {
        let t = RefTables::new(Degrees::new(2, 2).unwrap(), 2).unwrap();
        let e = deformed_element();
        let c = project_element(&|_| 1.0, &e, &t).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-13);
        assert!(c[1..].iter().all(|x| x.abs() < 1e-13));
    }

    #[test]
    fn projection_is_identity_on_the_space() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = RefTables::new(Degrees::new(2, 3).unwrap(), 2).unwrap();
        for e in [affine_element(), deformed_element()] {
            for _ in 0..20 {
                let c: Vec<f64> = (0..t.n_modes()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                // reconstruct in reference coordinates: evaluate through the
                // quadrature point's reference location
                let vol = &t.volume;
                let n = t.n_modes();
                let mut rhs = Col::<f64>::zeros(n);
                for (q, xi) in vol.points.iter().enumerate() {
                    let w = vol.weights[q] * e.map(xi).det * evaluate_element(&c, &t.basis, xi);
                    for i in 0..n {
                        rhs[i] += w * vol.phi[q * n + i];
                    }
                }
                let back = element_mass(&e, &t).llt(Side::Lower).unwrap().solve(&rhs);
                for i in 0..n {
                    assert!((back[i] - c[i]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn affine_polynomial_reproduced() {
        // on an affine element, polynomials in physical (t, x) of degree
        // (p_t, p_s) lie in the space
        let t = RefTables::new(Degrees::new(1, 2).unwrap(), 2).unwrap();
        let e = affine_element();
        let f = |z: &StPoint| (1.0 + 2.0 * z[0]) * (0.3 - z[1] + z[1] * z[1]) * (1.0 + z[2] * z[2]);
        let c = project_element(&f, &e, &t).unwrap();
        for xi in [[0.1, 0.2, -0.7], [-1.0, 1.0, 0.3], [0.5, -0.5, 0.5]] {
            let z = e.map(&xi).point;
            assert!((evaluate_element(&c, &t.basis, &xi) - f(&z)).abs() < 1e-12);
        }
    }

    #[test]
    fn facet_projection_linear_exact() {
        let t = RefTables::new(Degrees::new(1, 1).unwrap(), 2).unwrap();
        let e = affine_element();
        for face in 0..6 {
            for flip in [false, true] {
                let g = |z: &StPoint, _: &StPoint| 0.5 + z[0] - 2.0 * z[1] + 0.25 * z[2];
                let c = project_facet(&g, &e, face, flip, &t).unwrap();
                let ft = &t.faces[face];
                let mut psi = vec![0.0; ft.n_facet_modes];
                for (q, xi) in ft.points.iter().enumerate() {
                    ft.psi_at(q, flip, &mut psi);
                    let v: f64 = psi.iter().zip(&c).map(|(a, b)| a * b).sum();
                    let z = e.map(xi).point;
                    assert!((v - g(&z, &[0.0; 3])).abs() < 1e-12);
                }
            }
        }
    }
}
