//! Adaptive mirror-prox solvers for variational inequalities.
//!
//! [`adaptive_mirror_prox`] runs the extragradient scheme with a
//! backtracking estimate of the Lipschitz constant: each outer iteration
//! starts from half the previously accepted constant and doubles it until
//!
//! ```text
//! <g(y) - g(x), y - x+> <= L V(y, x) + L V(x+, y) + slack
//! ```
//!
//! holds, then stops once `sum 1/L_k >= R^2 / eps`.
//! [`inexact_adaptive_mirror_prox`] is the same loop driven by a noisy
//! oracle, with slack `eps/2 + delta_u` and the rule `sum 1/L_k >= 2 R^2 / eps`.
//! [`fixed_mirror_prox`] is the classical constant-step baseline.

mod bounds;
mod mirror_prox;

pub use bounds::{holder_iteration_bound, inexact_iteration_bound, lipschitz_iteration_bound, HolderBound};
pub use mirror_prox::{adaptive_mirror_prox, fixed_mirror_prox, inexact_adaptive_mirror_prox};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::FieldError;
use crate::geometry::{dot, GeometryError, ProxSetup};

/// Relative tolerance applied to the right-hand side of the acceptance test.
pub const CRITERION_RTOL: f64 = 1e-12;
/// Vertices are used as certificate probes when there are at most this many.
pub const PROBE_VERTEX_LIMIT: usize = 1024;
/// Random feasible points added to the certificate probe set.
pub const PROBE_RANDOM_POINTS: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("oracle dimension {oracle} does not match geometry dimension {setup}")]
    Dimension { oracle: usize, setup: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Starting constant `L0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialL {
    /// Secant-slope estimate, see [`crate::field::estimate_l0`].
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub epsilon: f64,
    pub l0: InitialL,
    /// Seed for the L0 estimate when `l0` is `Auto`.
    pub l0_seed: u64,
    pub max_outer: usize,
    pub max_backtracks_per_iter: usize,
    pub l_floor: f64,
    /// Keep `y`, `x+` and `g(y)` of every iteration in the trace.
    pub record_trace: bool,
    /// Seed of the random half of the certificate probe set.
    pub probe_seed: u64,
    /// Controllable oracle error used by the inexact method. `None` means
    /// `eps / 2`; the criterion slack is this value plus `delta_u`.
    #[serde(default)]
    pub controllable_error: Option<f64>,
}

impl SolverConfig {
    pub fn new(epsilon: f64) -> Self {
        SolverConfig {
            epsilon,
            l0: InitialL::Auto,
            l0_seed: 0,
            max_outer: 1_000_000,
            max_backtracks_per_iter: 60,
            l_floor: 1e-12,
            record_trace: false,
            probe_seed: 0,
            controllable_error: None,
        }
    }

    pub fn l0(mut self, l0: f64) -> Self {
        self.l0 = InitialL::Fixed(l0);
        self
    }

    pub fn record_trace(mut self, on: bool) -> Self {
        self.record_trace = on;
        self
    }

    pub fn max_outer(mut self, n: usize) -> Self {
        self.max_outer = n;
        self
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(SolverError::Config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if let InitialL::Fixed(l) = self.l0 {
            if !(l > 0.0 && l.is_finite()) {
                return Err(SolverError::Config(format!("L0 must be positive, got {l}")));
            }
        }
        if self.max_backtracks_per_iter == 0 {
            return Err(SolverError::Config("max_backtracks_per_iter must be at least 1".into()));
        }
        if self.max_outer == 0 {
            return Err(SolverError::Config("max_outer must be at least 1".into()));
        }
        if !(self.l_floor > 0.0 && self.l_floor.is_finite()) {
            return Err(SolverError::Config(format!("L floor must be positive, got {}", self.l_floor)));
        }
        if let Some(dc) = self.controllable_error {
            if !(dc >= 0.0 && dc.is_finite()) {
                return Err(SolverError::Config(format!("controllable error must be nonnegative, got {dc}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Adaptive,
    AdaptiveInexact,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    MaxOuterReached,
    BacktrackExhausted,
}

/// Iterate vectors of one accepted iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterateSnapshot {
    /// `y^{k+1}`
    pub y: Vec<f64>,
    /// `x^{k+1}`
    pub x_next: Vec<f64>,
    /// Oracle value at `y^{k+1}` (noisy for the inexact method).
    pub g_y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    /// Accepted constant `L^{k+1}`.
    pub l_accepted: f64,
    /// Number of criterion evaluations in this iteration.
    pub inner_trials: usize,
    /// `1 / L^{k+1}`.
    pub weight: f64,
    /// Running `S_{k+1}`.
    pub cumulative_s: f64,
    pub oracle_calls_so_far: u64,
    pub iterate: Option<IterateSnapshot>,
}

/// Running weighted sums over accepted iterations, enough to evaluate the
/// averaged iterate and the weighted gap functional without storing vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedSums {
    /// `S = sum w_k`
    pub s: f64,
    /// `sum w_k g(y_k)`
    pub field: Vec<f64>,
    /// `sum w_k <g(y_k), y_k>`
    pub inner: f64,
    /// `sum w_k y_k`
    pub point: Vec<f64>,
}

impl WeightedSums {
    pub fn new(dim: usize) -> Self {
        WeightedSums { s: 0.0, field: vec![0.0; dim], inner: 0.0, point: vec![0.0; dim] }
    }

    pub fn push(&mut self, weight: f64, y: &[f64], g_y: &[f64]) {
        self.s += weight;
        self.inner += weight * dot(g_y, y);
        for ((f, p), (&g, &yi)) in self.field.iter_mut().zip(self.point.iter_mut()).zip(g_y.iter().zip(y)) {
            *f += weight * g;
            *p += weight * yi;
        }
    }

    /// `sum w_k <g(y_k), y_k - x>`.
    pub fn functional_at(&self, x: &[f64]) -> f64 {
        self.inner - dot(&self.field, x)
    }

    /// `y~ = sum w_k y_k / S`, or `None` before the first iteration.
    pub fn average(&self) -> Option<Vec<f64>> {
        (self.s > 0.0).then(|| self.point.iter().map(|p| p / self.s).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub method: Method,
    pub status: Status,
    /// Outer iterations completed, `N`.
    pub iterations: usize,
    /// `S_N = sum_{k<N} 1 / L^{k+1}`.
    pub s_n: f64,
    /// Weighted average of the `y` iterates.
    pub y_tilde: Vec<f64>,
    pub x0: Vec<f64>,
    /// `x^N`.
    pub x_final: Vec<f64>,
    pub trace: Vec<IterationRecord>,
    /// `max_x V(x, x0)`, used by the stopping rule.
    pub r_sq_used: f64,
    /// `max_{x,y} V(x, y)`; `None` when unbounded.
    pub r_sq_diameter: Option<f64>,
    pub l0: f64,
    pub epsilon: Option<f64>,
    /// Additive slack in the acceptance test (`eps/2 + delta_u` for the
    /// inexact method, zero otherwise).
    pub slack: f64,
    pub oracle_calls: u64,
    pub prox_calls: u64,
    pub sums: WeightedSums,
    /// Largest value over the probe set of
    /// `sum w_k <g(y_k), y_k - x> - (V(x, x0) - V(x, x^N)) - S_N * slack`.
    /// Non-positive up to rounding whenever every step passed the criterion.
    pub certificate_residual_max: f64,
}

impl SolveResult {
    pub fn max_accepted_l(&self) -> Option<f64> {
        self.trace.iter().map(|r| r.l_accepted).reduce(f64::max)
    }

    pub fn min_accepted_l(&self) -> Option<f64> {
        self.trace.iter().map(|r| r.l_accepted).reduce(f64::min)
    }

    pub fn total_inner_trials(&self) -> usize {
        self.trace.iter().map(|r| r.inner_trials).sum()
    }
}

/// Acceptance test for one trial constant `l`:
/// `<g_y - g_x, y - x_next> <= l V(y, anchor) + l V(x_next, y) + slack`,
/// with a relative tolerance of [`CRITERION_RTOL`] on the right-hand side.
#[allow(clippy::too_many_arguments)]
pub fn check_criterion(
    setup: &ProxSetup,
    g_y: &[f64],
    g_x: &[f64],
    y: &[f64],
    x_next: &[f64],
    anchor: &[f64],
    l: f64,
    slack: f64,
) -> Result<bool, GeometryError> {
    let lhs: f64 = g_y
        .iter()
        .zip(g_x)
        .zip(y.iter().zip(x_next))
        .map(|((gy, gx), (yi, xi))| (gy - gx) * (yi - xi))
        .sum();
    let rhs = l * setup.bregman(y, anchor)? + l * setup.bregman(x_next, y)? + slack;
    Ok(lhs <= rhs + CRITERION_RTOL * rhs.abs())
}
