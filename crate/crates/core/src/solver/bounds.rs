//! A-priori iteration bounds.

use serde::{Deserialize, Serialize};

use super::SolverError;
use crate::field::HolderConstant;

/// `ceil(2 L R^2 / eps)`: worst-case iteration count of the adaptive method
/// on an `L`-Lipschitz field when `L0 <= 2L`.
pub fn lipschitz_iteration_bound(l: f64, r_sq: f64, epsilon: f64) -> u64 {
    (2.0 * l * r_sq / epsilon).ceil() as u64
}

/// `ceil(4 L R^2 / eps)`: the same bound for the inexact variant, whose
/// stopping threshold is twice as large.
pub fn inexact_iteration_bound(l: f64, r_sq: f64, epsilon: f64) -> u64 {
    (4.0 * l * r_sq / epsilon).ceil() as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderBound {
    /// `ceil(inf_nu (2 L_nu R^(1+nu) / eps)^(2/(1+nu)))`
    pub iterations: u64,
    /// `2 inf_nu L_nu (2 L_nu / eps)^((1-nu)/(1+nu))`; the bound applies when
    /// `L0` does not exceed this value.
    pub effective_two_l: f64,
}

/// Iteration bound for a field that is Hölder continuous with each of the
/// supplied `(nu, L_nu)` pairs. The infimum runs over the finite entries.
/// `radius` is `R`, not `R^2`.
pub fn holder_iteration_bound(
    params: &[HolderConstant],
    radius: f64,
    epsilon: f64,
) -> Result<HolderBound, SolverError> {
    if !(epsilon > 0.0) || !(radius >= 0.0) {
        return Err(SolverError::Config(format!("need eps > 0 and R >= 0, got eps={epsilon}, R={radius}")));
    }
    let mut best_n = f64::INFINITY;
    let mut best_l = f64::INFINITY;
    for p in params {
        if !(0.0..=1.0).contains(&p.nu) {
            return Err(SolverError::Config(format!("Hölder exponent {} outside [0, 1]", p.nu)));
        }
        if !p.constant.is_finite() {
            continue;
        }
        let n = (2.0 * p.constant * radius.powf(1.0 + p.nu) / epsilon).powf(2.0 / (1.0 + p.nu));
        let l = p.constant * (2.0 * p.constant / epsilon).powf((1.0 - p.nu) / (1.0 + p.nu));
        best_n = best_n.min(n);
        best_l = best_l.min(l);
    }
    if !best_n.is_finite() {
        return Err(SolverError::Config("no finite Hölder constant supplied".into()));
    }
    Ok(HolderBound { iterations: best_n.ceil() as u64, effective_two_l: 2.0 * best_l })
}
