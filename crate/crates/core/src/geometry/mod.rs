//! Feasible sets, norms, distance-generating functions, Bregman divergences
//! and exact prox-mappings.
//!
//! Every solver step reduces to [`ProxSetup::prox_map`], i.e. the problem
//!
//! ```text
//! argmin_{x in Q}  <g, x - anchor> + L * V(x, anchor)
//! ```
//!
//! which is solved in closed form for all supported (set, geometry) pairs.
//! The objective is strictly convex, so the minimizer is unique and no
//! tie-breaking is involved.
//!
//! All functions here are pure and may be called from several threads.

mod norm;
mod set;
mod setup;
mod simplex;

pub use norm::Norm;
pub use set::FeasibleSet;
pub use setup::{ProxSetup, DEFAULT_INTERIOR_FLOOR};
pub use simplex::project_onto_simplex;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("coordinate {index} = {value} is outside the entropy domain")]
    Domain { index: usize, value: f64 },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("invalid feasible set: {0}")]
    InvalidSet(String),
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<(), GeometryError> {
    if expected != got {
        return Err(GeometryError::Shape { expected, got });
    }
    Ok(())
}

/// Inner product of two equally sized slices.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm2(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[inline]
pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}
