use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, L0Setting, SolverKind};
use super::trace::save_trace;
use super::HarnessError;
use crate::field::InexactOracle;
use crate::problems::{certify_gap, GapReport, ProblemInstance};
use crate::solver::{
    adaptive_mirror_prox, fixed_mirror_prox, holder_iteration_bound, inexact_adaptive_mirror_prox,
    inexact_iteration_bound, lipschitz_iteration_bound, Method, SolveResult, Status,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub name: String,
    pub repetition: usize,
    pub method: Method,
    pub status: Status,
    pub iterations: usize,
    pub s_n: f64,
    pub oracle_calls: u64,
    pub prox_calls: u64,
    pub l0: f64,
    pub max_accepted_l: Option<f64>,
    pub min_accepted_l: Option<f64>,
    pub known_l: Option<f64>,
    pub r_sq: f64,
    pub weighted_gap: Option<f64>,
    pub weak_gap_at_probes: Option<f64>,
    pub saddle_gap: Option<f64>,
    pub certificate_residual_max: f64,
    pub theoretical_n_bound: Option<u64>,
    /// `L0 <= 2 known_L` (or the Hölder effective constant), so that
    /// `N <= theoretical_n_bound` is guaranteed for a converged run.
    pub bound_applies: bool,
    pub wall_time_s: f64,
    pub trace_path: Option<PathBuf>,
    pub iterates_path: Option<PathBuf>,
}

impl RunSummary {
    /// `Some(N <= bound)` when the guarantee applies.
    pub fn within_bound(&self) -> Option<bool> {
        match (self.bound_applies && self.status == Status::Converged, self.theoretical_n_bound) {
            (true, Some(b)) => Some(self.iterations as u64 <= b),
            _ => None,
        }
    }
}

/// A finished run together with its instance.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub summary: RunSummary,
    pub result: SolveResult,
    pub instance: ProblemInstance,
    pub gaps: Option<GapReport>,
}

/// Runs every repetition of `config` (in parallel) and returns the summaries
/// in repetition order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RunSummary>, HarnessError> {
    config.validate()?;
    (0..config.repetitions)
        .into_par_iter()
        .map(|rep| run_single(config, rep).map(|o| o.summary))
        .collect()
}

pub fn run_single(config: &ExperimentConfig, rep: usize) -> Result<RunOutcome, HarnessError> {
    run_tagged(config, rep, None)
}

fn run_tagged(config: &ExperimentConfig, rep: usize, tag: Option<&str>) -> Result<RunOutcome, HarnessError> {
    let instance = config.build_instance(rep)?;
    let spec = &config.solver;
    let started = Instant::now();
    let result = match spec.kind {
        SolverKind::Adaptive => {
            let c = spec.solver_config(instance.known_l)?;
            adaptive_mirror_prox(&instance.oracle, &instance.setup, &c)?
        }
        SolverKind::AdaptiveInexact => {
            let c = spec.solver_config(instance.known_l)?;
            let noisy = InexactOracle::new(
                instance.oracle.clone(),
                instance.setup.norm(),
                spec.delta_u,
                spec.noise_seed.wrapping_add(rep as u64),
            );
            inexact_adaptive_mirror_prox(&noisy, &instance.setup, &c)?
        }
        SolverKind::Fixed => {
            let l = fixed_constant(config, &instance)?;
            let iterations = match spec.fixed_iterations {
                Some(n) => n,
                None => lipschitz_iteration_bound(l, instance.setup.prox_radius_sq(), spec.epsilon) as usize,
            };
            fixed_mirror_prox(&instance.oracle, &instance.setup, l, iterations, spec.record_trace)?
        }
    };
    let wall_time_s = started.elapsed().as_secs_f64();

    let gaps = if result.s_n > 0.0 { Some(certify_gap(&result, &instance)?) } else { None };
    let (theoretical_n_bound, bound_applies) = theoretical_bound(config, &instance, &result)?;

    let (trace_path, iterates_path) = match &config.output {
        Some(out) => {
            std::fs::create_dir_all(&out.dir).map_err(|e| HarnessError::io(&out.dir, e))?;
            let stem = match tag {
                Some(t) => format!("{}-{t}-rep{rep}", config.display_name()),
                None => format!("{}-rep{rep}", config.display_name()),
            };
            let csv = out.dir.join(format!("{stem}.trace.csv"));
            let bin = spec.record_trace.then(|| out.dir.join(format!("{stem}.iterates.bin")));
            save_trace(&result.trace, &csv, bin.as_deref())?;
            (Some(csv), bin)
        }
        None => (None, None),
    };

    let summary = RunSummary {
        name: config.display_name(),
        repetition: rep,
        method: result.method,
        status: result.status,
        iterations: result.iterations,
        s_n: result.s_n,
        oracle_calls: result.oracle_calls,
        prox_calls: result.prox_calls,
        l0: result.l0,
        max_accepted_l: result.max_accepted_l(),
        min_accepted_l: result.min_accepted_l(),
        known_l: instance.known_l,
        r_sq: result.r_sq_used,
        weighted_gap: gaps.as_ref().map(|g| g.weighted_gap),
        weak_gap_at_probes: gaps.as_ref().map(|g| g.weak_gap_at_probes),
        saddle_gap: gaps.as_ref().and_then(|g| g.saddle_gap),
        certificate_residual_max: result.certificate_residual_max,
        theoretical_n_bound,
        bound_applies,
        wall_time_s,
        trace_path,
        iterates_path,
    };
    if let Some(out) = &config.output {
        let stem = summary.trace_path.as_ref().and_then(|p| p.file_name()).map(|f| f.to_string_lossy().replace(".trace.csv", ""));
        let path = out.dir.join(format!("{}.summary.json", stem.unwrap_or_default()));
        let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
        std::fs::write(&path, text).map_err(|e| HarnessError::io(&path, e))?;
    }
    Ok(RunOutcome { summary, result, instance, gaps })
}

fn fixed_constant(config: &ExperimentConfig, instance: &ProblemInstance) -> Result<f64, HarnessError> {
    config
        .solver
        .fixed_l
        .or(instance.known_l)
        .ok_or_else(|| HarnessError::config("solver.fixed_l", "required when the instance has no known L"))
}

/// Bound on N and whether its hypothesis `L0 <= 2L` holds for this run.
fn theoretical_bound(
    config: &ExperimentConfig,
    instance: &ProblemInstance,
    result: &SolveResult,
) -> Result<(Option<u64>, bool), HarnessError> {
    let eps = config.solver.epsilon;
    let r_sq = result.r_sq_used;
    Ok(match (result.method, instance.known_l) {
        (Method::Fixed, _) => (Some(result.iterations as u64), true),
        (Method::Adaptive, Some(l)) if l > 0.0 => {
            (Some(lipschitz_iteration_bound(l, r_sq, eps)), result.l0 <= 2.0 * l)
        }
        (Method::AdaptiveInexact, Some(l)) if l > 0.0 => {
            (Some(inexact_iteration_bound(l, r_sq, eps)), result.l0 <= 2.0 * l)
        }
        (Method::Adaptive, _) if !instance.oracle.holder.is_empty() => {
            let b = holder_iteration_bound(&instance.oracle.holder, r_sq.sqrt(), eps)?;
            (Some(b.iterations), result.l0 <= b.effective_two_l)
        }
        _ => (None, false),
    })
}

/// Recomputes call counters from the trace and compares them with the
/// summary: adaptive runs make `N + sum trials` oracle calls and
/// `2 sum trials` prox calls; fixed runs make two of each per iteration.
pub fn counters_consistent(summary: &RunSummary, trace: &[crate::solver::IterationRecord]) -> bool {
    let n = trace.len() as u64;
    let trials: u64 = trace.iter().map(|r| r.inner_trials as u64).sum();
    let (oracle, prox) = match summary.method {
        Method::Fixed => (2 * n, 2 * n),
        _ => (n + trials, 2 * trials),
    };
    let last = trace.last().map_or(0, |r| r.oracle_calls_so_far);
    n == summary.iterations as u64 && oracle == summary.oracle_calls && prox == summary.prox_calls && last == oracle
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub variant: String,
    pub method: Method,
    pub status: Status,
    pub iterations: usize,
    pub oracle_calls: u64,
    pub prox_calls: u64,
    pub l0: f64,
    pub max_accepted_l: Option<f64>,
    pub weighted_gap: Option<f64>,
    pub saddle_gap: Option<f64>,
    pub theoretical_n_bound: Option<u64>,
}

/// Runs each variant on the repetition-0 instance of `config`.
///
/// Variants are `kind[:key=value,...]` with kind `adaptive`, `inexact` or
/// `fixed`. Keys: `l0` (number or `auto`), `l0_scale`, `delta_u`,
/// `noise_seed`, `l` (number or `known`), `iterations` (number or `bound`).
pub fn compare_solvers(config: &ExperimentConfig, variants: &[String]) -> Result<Vec<ComparisonRow>, HarnessError> {
    if variants.len() < 2 {
        return Err(HarnessError::config("variants", "comparison needs at least two variants"));
    }
    let configs = variants
        .iter()
        .map(|v| apply_variant(config, v))
        .collect::<Result<Vec<_>, _>>()?;
    configs
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let o = run_tagged(c, 0, Some(&format!("v{i}")))?;
            Ok(ComparisonRow {
                variant: variants[i].clone(),
                method: o.summary.method,
                status: o.summary.status,
                iterations: o.summary.iterations,
                oracle_calls: o.summary.oracle_calls,
                prox_calls: o.summary.prox_calls,
                l0: o.summary.l0,
                max_accepted_l: o.summary.max_accepted_l,
                weighted_gap: o.summary.weighted_gap,
                saddle_gap: o.summary.saddle_gap,
                theoretical_n_bound: o.summary.theoretical_n_bound,
            })
        })
        .collect()
}

pub fn apply_variant(config: &ExperimentConfig, variant: &str) -> Result<ExperimentConfig, HarnessError> {
    let bad = |msg: String| HarnessError::config(&format!("variant `{variant}`"), msg);
    let (kind, rest) = variant.split_once(':').unwrap_or((variant, ""));
    let mut c = config.clone();
    c.repetitions = 1;
    c.solver.kind = match kind.trim() {
        "adaptive" => SolverKind::Adaptive,
        "inexact" | "adaptive_inexact" => SolverKind::AdaptiveInexact,
        "fixed" => SolverKind::Fixed,
        other => return Err(bad(format!("unknown solver kind `{other}`"))),
    };
    for kv in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = kv.split_once('=').ok_or_else(|| bad(format!("expected key=value, got `{kv}`")))?;
        let num = || v.parse::<f64>().map_err(|_| bad(format!("`{k}` needs a number, got `{v}`")));
        match k {
            "l0" if v == "auto" => {
                c.solver.l0 = L0Setting::default();
                c.solver.l0_scale = None;
            }
            "l0" => {
                c.solver.l0 = L0Setting::Value(num()?);
                c.solver.l0_scale = None;
            }
            "l0_scale" => c.solver.l0_scale = Some(num()?),
            "delta_u" => c.solver.delta_u = num()?,
            "noise_seed" => c.solver.noise_seed = num()? as u64,
            "l" if v == "known" => c.solver.fixed_l = None,
            "l" => c.solver.fixed_l = Some(num()?),
            "iterations" if v == "bound" => c.solver.fixed_iterations = None,
            "iterations" => c.solver.fixed_iterations = Some(num()? as usize),
            _ => return Err(bad(format!("unknown key `{k}`"))),
        }
    }
    c.validate()?;
    Ok(c)
}

/// Plain-text table of a comparison.
pub fn format_table(rows: &[ComparisonRow]) -> String {
    let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.3e}"));
    let mut s = format!(
        "{:<32} {:>10} {:>9} {:>12} {:>12} {:>11} {:>11} {:>11}\n",
        "variant", "status", "N", "oracle", "prox", "max_L", "gap", "saddle_gap"
    );
    for r in rows {
        let status = match r.status {
            Status::Converged => "converged",
            Status::MaxOuterReached => "max_outer",
            Status::BacktrackExhausted => "backtrack",
        };
        s.push_str(&format!(
            "{:<32} {:>10} {:>9} {:>12} {:>12} {:>11} {:>11} {:>11}\n",
            r.variant,
            status,
            r.iterations,
            r.oracle_calls,
            r.prox_calls,
            opt(r.max_accepted_l),
            opt(r.weighted_gap),
            opt(r.saddle_gap)
        ));
    }
    s
}
