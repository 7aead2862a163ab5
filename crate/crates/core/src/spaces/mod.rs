//! Tensor-product Legendre bases, Gauss-Legendre quadrature, reference
//! tabulations and element/facet L² projections.

mod basis;
mod legendre;
mod projection;
mod quadrature;
mod tables;

pub use basis::{BasisSet, Degrees, FacetBasisSet, MAX_DEGREE};
pub use legendre::{legendre, legendre_with_derivative};
pub use projection::{element_mass, evaluate_element, evaluate_facet, facet_mass, project_element, project_facet};
pub use quadrature::{gauss_legendre, quadrature_for, QuadratureRule};
pub use tables::{FaceTable, RefTables, VolumeTable};
