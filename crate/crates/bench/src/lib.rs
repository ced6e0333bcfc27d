//! Experiment harness for `gaussgrid`: Smolyak sweeps on scalar test
//! functions, adaptive collocation of the lognormal diffusion problem,
//! and the auxiliary tables behind the `gaussgrid` command.

pub mod config;
pub mod curve;
pub mod functions;
pub mod mc;
pub mod pde;
pub mod scalar;
pub mod tables;

pub use config::ExperimentConfig;
pub use curve::{compare_curves, median_smooth, Comparison, ErrorCurve};
pub use mc::{mc_l2_error, McError};
pub use pde::{run_pde_bench, PdeOutcome, PdeSettings};
pub use scalar::{run_interpolation_bench, run_quadrature_bench};
