//! Estimating the number of communities in a network from the spectra of the
//! non-backtracking matrix and the Bethe Hessian.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`]: immutable simple graphs, edge-list parsing, degree statistics.
//! * [`operators`]: the non-backtracking matrices and the Bethe Hessian.
//! * [`eigen`]: dense and Krylov eigensolvers and `LDLᵀ` inertia.
//! * [`estimators`]: the NB, BHm, BHmc, BHa and BHac estimators.
//! * [`randnet`]: stochastic block model and degree-corrected samplers.
//! * [`datasets`]: the bundled and externally supplied real networks.

pub mod datasets;
pub mod eigen;
pub mod error;
pub mod estimators;
pub mod graph;
pub mod operators;
pub mod randnet;
pub mod sparse;

pub use error::{Error, Result};
pub use estimators::{estimate, EstimateReport, EstimatorConfig, Method};
pub use graph::{degree_stats, largest_connected_component, DegreeStats, Graph};
pub use sparse::CsrMatrix;
