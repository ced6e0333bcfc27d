//! Sparse-grid stochastic collocation for functions of Gaussian random
//! variables.
//!
//! The numerical kernels are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the precision for the common case. Node generation,
//! random fields and the adaptive driver work in `f64`.

pub mod adaptive;
pub mod barycentric;
pub mod error;
pub mod field;
pub mod hermite;
pub mod linalg;
pub mod multiindex;
pub mod nodes;
pub mod pde;
pub mod scalar;
pub mod sparse_grid;

pub use adaptive::{
    a_priori_set, run_a_posteriori, run_a_posteriori_with, AdaptiveConfig, AdaptiveState, CollocationModel, FnModel,
    Profit, TraceRecord,
};
pub use error::{Error, Result};
pub use field::{FieldExpansion, FieldKind};
pub use hermite::{hermite_eval, hermite_tensor_eval, HermiteExpansion};
pub use multiindex::{combination_coefficients, reduced_margin, smolyak_set, MultiIndex, MultiIndexSet};
pub use nodes::{NodeFamily, RuleTable, UnivariateRule};
pub use pde::{h1_distance, FemSolution, LognormalProblem};
pub use scalar::Scalar;
pub use sparse_grid::{best_n_term_curve, CountStrategy, GridValue, PointCounts, PointKey, SparseGrid};

pub type SparseGrid64 = SparseGrid<f64>;
pub type SparseGrid32 = SparseGrid<f32>;
pub type HermiteExpansion64 = HermiteExpansion<f64>;
pub type FemSolution64 = FemSolution<f64>;
pub type RuleTable64 = RuleTable<f64>;
