//! Mesh-dependent norms, error evaluation against exact solutions, and
//! empirical checks of the inverse, trace, Poincaré, coercivity,
//! boundedness and inf-sup inequalities.

mod constants;
mod norms;
mod operator;
mod projection;
mod sampling;

pub use constants::{
    element_constants, estimate_trace_constants, generalized_eigenvalues, generalized_max_eigenvalue, measured_penalty,
    ConstantEstimates, ElementConstants,
};
pub use norms::{error_tables, max_pointwise_error, slab_error, time_weight, volume_weight, NormReport};
pub use operator::{assemble_operator, quadratic, NormKind, SlabOperator};
pub use projection::{
    log_slope, projection_errors, projection_rate_study, ProjectionErrors, ProjectionLevel, ProjectionRates,
};
pub use sampling::{
    check_boundedness, check_coercivity, check_infsup, check_poincare, infsup_test_function, SampleReport, DEFAULT_SEED,
};
