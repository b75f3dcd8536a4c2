//! Numerical laboratory for Calderón-type commutators on one-dimensional grids.
//!
//! Every function is piecewise constant on a uniform power-of-two grid, so
//! integrals, antiderivatives and interval averages are exact. The building
//! blocks are generic over [`Real`]; the aliases at the crate root fix `f64`.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod grid;
pub mod kernels;
pub mod maximal;
pub mod scalar;
pub mod sparse;
pub mod weights;

pub use error::{Error, Result};
pub use grid::{CellSet, DyadicLattice, GridInterval, SearchMode};
pub use maximal::{FnOperator, MultiSublinear, PointwiseIdentity};
pub use scalar::Real;
pub use sparse::{SparseEntry, SparseFamily};

pub type Grid = grid::Grid<f64>;
pub type SampledFunction = grid::SampledFunction<f64>;
pub type PiecewiseLinear = grid::PiecewiseLinear<f64>;
pub type LipschitzData = kernels::LipschitzData<f64>;
pub type ApproxIdentity = kernels::ApproxIdentity<f64>;
pub type CommutatorOperator = kernels::CommutatorOperator<f64>;
pub type InputSet = maximal::InputSet<f64>;
pub type Weight = weights::Weight<f64>;
pub type WeightVector = weights::WeightVector<f64>;
pub type EndpointDecomposition = sparse::EndpointDecomposition<f64>;
