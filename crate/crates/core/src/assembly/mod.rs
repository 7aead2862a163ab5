//! Problem data and element-local realizations of the advective and
//! diffusive bilinear forms, the right-hand side, and Dirichlet handling.

pub(crate) mod local;
mod problem;

pub use local::{
    assemble_advective, assemble_diffusive, assemble_local, assemble_rhs, default_penalty, FaceBlocks, FaceRoles,
    LocalSystem,
};
pub use problem::{neumann_from_exact, ExactSolution, Problem, ProblemSpec};
