//! Benchmark VI instances and exact gap certification.
//!
//! Three families cover the smoothness regimes the solvers are analysed
//! for: bilinear saddle points and affine fields (Lipschitz), and separable
//! signed-power fields (Hölder). Any of them can be wrapped in an
//! [`crate::field::InexactOracle`].

mod gap;
mod instances;

pub use gap::{certify_gap, certify_sums, weighted_average, GapReport};
pub use instances::{
    bilinear_from_matrix, holder_center, holder_constant_l2, make_affine_vi, make_bilinear_saddle,
    make_holder_field, operator_norm, random_affine_vi, ProblemInstance, Structure,
};

use thiserror::Error;

use crate::field::FieldError;
use crate::geometry::GeometryError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("trace is empty")]
    EmptyTrace,
    #[error("trace does not hold iterate vectors; rerun with record_trace")]
    MissingIterates,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Field(#[from] FieldError),
}
