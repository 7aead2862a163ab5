//! Slab-by-slab solution: static condensation onto the vertical facet
//! unknowns, a sparse global solve, local recovery, and time marching.

mod checkpoint;
mod condense;
mod march;
mod monolithic;

pub use checkpoint::{read_checkpoint, write_checkpoint, Checkpoint};
pub use condense::{condense, CondensedElement};
pub use march::{
    initial_trace, march, solve_slab, top_trace, MarchConfig, SlabContext, SlabSolution, DEFAULT_TOLERANCE,
};
pub use monolithic::solve_slab_monolithic;
