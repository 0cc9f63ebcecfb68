//! Exact solvers and solution-preserving reductions between P-matrix LCPs, unique sink
//! orientations, contraction maps, grid direction problems and end-of-potential-line problems.

pub mod arith;
pub mod bits;
pub mod circuit;
pub mod cli;
pub mod error;
pub mod generators;
pub mod problems;
pub mod reductions;
pub mod solvers;

pub use error::{PotlineError, Result};
