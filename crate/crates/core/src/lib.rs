//! Space-time hybridizable discontinuous Galerkin (HDG) discretization of
//! the scalar advection-diffusion equation on moving and deforming domains.
//!
//! The space-time domain is cut into slabs between consecutive time levels.
//! Each slab is meshed with multilinear space-time elements obtained by
//! connecting a deforming spatial mesh at `t_n` and `t_{n+1}`. Element
//! unknowns are eliminated locally (static condensation) and a sparse system
//! for the facet traces is solved per slab, marching causally in time.
//!
//! Module map:
//! - [`geometry`]: spatial meshes, deformation maps, slabs, elements, facets.
//! - [`spaces`]: Legendre tensor bases, Gauss quadrature, L² projections.
//! - [`assembly`]: problem description and element-local bilinear forms.
//! - [`solver`]: condensation, per-slab solve, time marching, checkpoints.
//! - [`analysis`]: mesh-dependent norms, inequality constants, sampling.
//! - [`harness`]: built-in problems, run configuration, convergence studies.

// NaN-rejecting `!(x > 0.0)` checks and index loops over coupled arrays are
// deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod assembly;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod par;
pub mod solver;
pub mod spaces;

pub use error::{Error, Result};

/// A point in space-time, `(t, x_1, .., x_d)`. Entries past `d + 1` are zero.
pub type StPoint = [f64; 3];
