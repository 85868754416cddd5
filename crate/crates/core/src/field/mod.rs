//! Vector-field oracles `g: Q -> R^n` for variational inequalities.
//!
//! A [`FieldOracle`] wraps a [`VectorField`] together with the smoothness
//! metadata the solvers and bound calculators use, and counts evaluations.
//! [`InexactOracle`] adds bounded additive noise on top of an exact oracle.

mod inexact;
mod library;

pub use inexact::{InexactOracle, NoiseModel};
pub use library::{AffineField, BilinearField, FnField, HolderField, ZeroField};

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GeometryError, ProxSetup};

/// Number of point pairs drawn by [`estimate_l0`].
pub const DEFAULT_L0_PAIRS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("field returned a non-finite value at x = {x:?}")]
    NonFinite { x: Vec<f64> },
    #[error("dimension mismatch: field has dimension {expected}, point has {got}")]
    Shape { expected: usize, got: usize },
    #[error(
        "could not estimate L0: the field took equal values on all {pairs} sampled pairs; \
         supply L0 explicitly"
    )]
    EstimationFailed { pairs: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// A map `x -> g(x)` writing into a caller-provided buffer.
pub trait VectorField: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], out: &mut [f64]);
}

/// `(nu, L_nu)` with `||g(x) - g(y)||_* <= L_nu ||x - y||^nu`. `L_nu` may be
/// infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderConstant {
    pub nu: f64,
    pub constant: f64,
}

/// Anything the mirror-prox loop can query.
pub trait Oracle {
    fn dim(&self) -> usize;
    fn query(&self, x: &[f64]) -> Result<Vec<f64>, FieldError>;
    /// Counted evaluations so far.
    fn calls(&self) -> u64;
}

/// A VI field with smoothness metadata and an evaluation counter.
///
/// The counter is atomic so a shared oracle may be queried from several
/// runs at once. Clones share the field but get their own counter, starting
/// from the current count.
pub struct FieldOracle {
    field: Arc<dyn VectorField>,
    pub monotone: bool,
    pub lipschitz: Option<f64>,
    pub holder: Vec<HolderConstant>,
    calls: AtomicU64,
}

impl FieldOracle {
    pub fn new(field: impl VectorField + 'static) -> Self {
        Self::from_arc(Arc::new(field))
    }

    pub fn from_arc(field: Arc<dyn VectorField>) -> Self {
        FieldOracle { field, monotone: false, lipschitz: None, holder: Vec::new(), calls: AtomicU64::new(0) }
    }

    pub fn monotone(mut self, flag: bool) -> Self {
        self.monotone = flag;
        self
    }

    pub fn with_lipschitz(mut self, l: f64) -> Self {
        self.lipschitz = Some(l);
        self
    }

    pub fn with_holder(mut self, params: Vec<HolderConstant>) -> Self {
        self.holder = params;
        self
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }

    pub fn field(&self) -> &Arc<dyn VectorField> {
        &self.field
    }

    /// Evaluates `g(x)` and bumps the call counter.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>, FieldError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.eval_uncounted(x)
    }

    /// Evaluates `g(x)` without touching the counter. Used by diagnostics
    /// (L0 estimation, gap certification) so that solver accounting stays
    /// exact.
    pub fn eval_uncounted(&self, x: &[f64]) -> Result<Vec<f64>, FieldError> {
        let n = self.dim();
        if x.len() != n {
            return Err(FieldError::Shape { expected: n, got: x.len() });
        }
        let mut out = vec![0.0; n];
        self.field.apply(x, &mut out);
        if out.iter().any(|v| !v.is_finite()) {
            return Err(FieldError::NonFinite { x: x.to_vec() });
        }
        Ok(out)
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset_calls(&self) {
        self.calls.store(0, Ordering::Relaxed);
    }
}

impl Clone for FieldOracle {
    fn clone(&self) -> Self {
        FieldOracle {
            field: Arc::clone(&self.field),
            monotone: self.monotone,
            lipschitz: self.lipschitz,
            holder: self.holder.clone(),
            calls: AtomicU64::new(self.calls()),
        }
    }
}

impl fmt::Debug for FieldOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldOracle")
            .field("field", &self.field)
            .field("monotone", &self.monotone)
            .field("lipschitz", &self.lipschitz)
            .field("holder", &self.holder)
            .field("calls", &self.calls())
            .finish()
    }
}

impl Oracle for FieldOracle {
    fn dim(&self) -> usize {
        FieldOracle::dim(self)
    }

    fn query(&self, x: &[f64]) -> Result<Vec<f64>, FieldError> {
        self.eval(x)
    }

    fn calls(&self) -> u64 {
        FieldOracle::calls(self)
    }
}

/// Secant-slope estimate of the Lipschitz constant over
/// [`DEFAULT_L0_PAIRS`] seeded pairs of feasible points.
pub fn estimate_l0(oracle: &FieldOracle, setup: &ProxSetup, seed: u64) -> Result<f64, FieldError> {
    estimate_l0_with_pairs(oracle, setup, seed, DEFAULT_L0_PAIRS)
}

/// Returns the largest `||g(x) - g(y)||_* / ||x - y||` over `pairs` seeded
/// pairs with `g(x) != g(y)`. Every secant slope is a lower bound for any
/// valid Lipschitz constant, so the result is `<= L`.
pub fn estimate_l0_with_pairs(
    oracle: &FieldOracle,
    setup: &ProxSetup,
    seed: u64,
    pairs: usize,
) -> Result<f64, FieldError> {
    let set = setup.set();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<f64> = None;
    for _ in 0..pairs {
        let x = set.sample(&mut rng);
        let y = set.sample(&mut rng);
        let gx = oracle.eval_uncounted(&x)?;
        let gy = oracle.eval_uncounted(&y)?;
        if gx == gy {
            continue;
        }
        let dx: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        let dg: Vec<f64> = gx.iter().zip(&gy).map(|(a, b)| a - b).collect();
        let dist = setup.primal_norm(&dx);
        if dist > 0.0 {
            let slope = setup.dual_norm(&dg) / dist;
            best = Some(best.map_or(slope, |b: f64| b.max(slope)));
        }
    }
    best.ok_or(FieldError::EstimationFailed { pairs })
}
