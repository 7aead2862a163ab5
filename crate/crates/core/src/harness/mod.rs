//! Built-in benchmark problems, run configuration, convergence studies and
//! verification suites used by the command-line tool.

mod config;
mod problems;
mod run;
mod study;
pub mod verify;

pub use config::{OutputPaths, RunConfig};
pub use problems::{benchmark, Benchmark, Constant, PolynomialSolution, RotatingPulse, Translation, BENCHMARKS};
pub use run::{resolve_penalty, run, PenaltySource, RunReport, SlabRecord};
pub use study::{convergence_study, format_table, ConvergenceRow, ConvergenceTable, StudyConfig};
pub use verify::{run_suite, CheckOutcome, SUITES};
