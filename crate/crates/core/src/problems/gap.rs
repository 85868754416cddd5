use serde::{Deserialize, Serialize};

use super::{ProblemError, ProblemInstance, Structure};
use crate::geometry::{dot, sub};
use crate::solver::{IterationRecord, SolveResult, WeightedSums, PROBE_RANDOM_POINTS, PROBE_VERTEX_LIMIT};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    /// `max_{x in Q} (1/S) sum w_k <g(y_k), y_k - x>`, maximized exactly.
    pub weighted_gap: f64,
    /// `max <g(x), y~ - x>` over the probe set: a lower bound on the weak
    /// merit function, not an exact value.
    pub weak_gap_at_probes: f64,
    /// `max_j (A^T x~)_j - min_i (A y~)_i`, bilinear instances only.
    pub saddle_gap: Option<f64>,
    pub probes: usize,
}

/// `y~ = sum w_k y_k / sum w_k` from a trace with recorded iterates.
pub fn weighted_average(trace: &[IterationRecord]) -> Result<Vec<f64>, ProblemError> {
    let first = trace.first().ok_or(ProblemError::EmptyTrace)?;
    let dim = first.iterate.as_ref().ok_or(ProblemError::MissingIterates)?.y.len();
    let mut acc = vec![0.0; dim];
    let mut s = 0.0;
    for rec in trace {
        let snap = rec.iterate.as_ref().ok_or(ProblemError::MissingIterates)?;
        s += rec.weight;
        acc.iter_mut().zip(&snap.y).for_each(|(a, y)| *a += rec.weight * y);
    }
    Ok(acc.into_iter().map(|a| a / s).collect())
}

pub fn certify_gap(result: &SolveResult, instance: &ProblemInstance) -> Result<GapReport, ProblemError> {
    certify_sums(&result.sums, instance)
}

/// Gap certificates from the running weighted sums of a run.
///
/// The weighted gap is linear in `x`, so its maximum over `Q` is the support
/// function of `-sum w_k g(y_k)` plus a constant.
pub fn certify_sums(sums: &WeightedSums, instance: &ProblemInstance) -> Result<GapReport, ProblemError> {
    let y_tilde = sums.average().ok_or(ProblemError::EmptyTrace)?;
    let set = instance.setup.set();

    let neg: Vec<f64> = sums.field.iter().map(|v| -v).collect();
    let (support, _) = set.support(&neg);
    let weighted_gap = (sums.inner + support) / sums.s;

    let mut probes = set.probe_points(PROBE_VERTEX_LIMIT, PROBE_RANDOM_POINTS, instance.rng_seed);
    if let Some(sol) = &instance.known_solution {
        probes.push(sol.clone());
    }
    probes.push(y_tilde.clone());
    let mut weak = f64::NEG_INFINITY;
    for p in &probes {
        let g = instance.oracle.eval_uncounted(p)?;
        weak = weak.max(dot(&g, &sub(&y_tilde, p)));
    }

    let saddle_gap = match &instance.structure {
        Structure::Bilinear { a } => {
            let m = a.nrows();
            let x = nalgebra::DVector::from_column_slice(&y_tilde[..m]);
            let y = nalgebra::DVector::from_column_slice(&y_tilde[m..]);
            let best_response_y = (a.transpose() * x).max();
            let best_response_x = (a * y).min();
            Some(best_response_y - best_response_x)
        }
        _ => None,
    };

    Ok(GapReport { weighted_gap, weak_gap_at_probes: weak, saddle_gap, probes: probes.len() })
}
