//! Scenario runner for `calclab-core`: seeded inputs, verification suites and reports.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eval;
pub mod inputs;
pub mod report;
pub mod scenario;
pub mod suites;

pub use inputs::{generate_inputs, parse_weight, RandomScenario, SampledInputs};
pub use report::{Check, Format, Report};
pub use scenario::Scenario;
pub use suites::run_suite;
