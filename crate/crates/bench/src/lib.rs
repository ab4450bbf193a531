//! Experiment harness for the spectral community-count estimators.
//!
//! * [`plan`]: JSON experiment plans (one swept block-model parameter).
//! * [`runner`]: replicated, seed-deterministic accuracy sweeps.
//! * [`export`]: CSV/JSON output with byte-stable ordering.
//! * [`real`]: estimates on real networks against reference rows.

pub mod error;
pub mod export;
pub mod plan;
pub mod real;
pub mod runner;

pub use error::{BenchError, Result};
pub use export::{export, ExportOptions, Format};
pub use plan::{ExperimentPlan, Sweep, SweepValue};
pub use real::{eval_real, RealRow};
pub use runner::{run_plan, ExperimentOutcome};
