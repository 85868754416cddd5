use super::{
    check_criterion, InitialL, IterateSnapshot, IterationRecord, Method, SolveResult, SolverConfig,
    SolverError, Status, WeightedSums, PROBE_RANDOM_POINTS, PROBE_VERTEX_LIMIT,
};
use crate::field::{estimate_l0, FieldOracle, InexactOracle, Oracle};
use crate::geometry::ProxSetup;

/// Adaptive mirror-prox with backtracking on the Lipschitz constant.
///
/// `g(x^N)` is evaluated once per outer iteration and reused across
/// backtracks; `g(y)` is re-evaluated for every trial constant. Oracle calls
/// therefore total `N + sum inner_trials`, and prox calls `2 sum inner_trials`.
pub fn adaptive_mirror_prox(
    oracle: &FieldOracle,
    setup: &ProxSetup,
    config: &SolverConfig,
) -> Result<SolveResult, SolverError> {
    config.validate()?;
    check_dims(oracle.dim(), setup)?;
    let l0 = resolve_l0(oracle, setup, config)?;
    let r_sq = setup.prox_radius_sq();
    let spec = LoopSpec {
        method: Method::Adaptive,
        slack: 0.0,
        stop_at: r_sq / config.epsilon,
    };
    run_adaptive(oracle, setup, config, l0, r_sq, spec)
}

/// Adaptive mirror-prox driven by an inexact oracle. The controllable error
/// defaults to `eps / 2`: the criterion gains slack `eps/2 + delta_u` and the
/// method stops once `S_N >= 2 R^2 / eps`, with `R^2 = max_x V(x, x0)`.
///
/// With `InitialL::Auto` the L0 estimate is taken on the exact inner field.
pub fn inexact_adaptive_mirror_prox(
    oracle: &InexactOracle,
    setup: &ProxSetup,
    config: &SolverConfig,
) -> Result<SolveResult, SolverError> {
    config.validate()?;
    check_dims(oracle.dim(), setup)?;
    let l0 = resolve_l0(&oracle.inner, setup, config)?;
    let r_sq = setup.prox_radius_sq();
    let spec = LoopSpec {
        method: Method::AdaptiveInexact,
        slack: config.controllable_error.unwrap_or(config.epsilon / 2.0) + oracle.delta_u,
        stop_at: 2.0 * r_sq / config.epsilon,
    };
    run_adaptive(oracle, setup, config, l0, r_sq, spec)
}

/// Constant-step mirror-prox: `iterations` steps at `l_fixed`, no criterion
/// check. All weights equal `1 / l_fixed`, so `y~` is the plain average.
/// Reports `Converged` once the iteration budget is spent.
pub fn fixed_mirror_prox(
    oracle: &FieldOracle,
    setup: &ProxSetup,
    l_fixed: f64,
    iterations: usize,
    record_trace: bool,
) -> Result<SolveResult, SolverError> {
    if !(l_fixed > 0.0 && l_fixed.is_finite()) {
        return Err(SolverError::Config(format!("fixed constant must be positive, got {l_fixed}")));
    }
    if iterations == 0 {
        return Err(SolverError::Config("fixed run needs at least one iteration".into()));
    }
    check_dims(oracle.dim(), setup)?;
    let x0 = setup.prox_center();
    let mut x = x0.clone();
    let mut sums = WeightedSums::new(x.len());
    let mut trace = Vec::with_capacity(iterations);
    let mut calls = 0u64;
    let weight = 1.0 / l_fixed;
    let mut prox_calls = 0;

    for k in 0..iterations {
        let g_x = oracle.eval(&x)?;
        let y = setup.prox_map(&g_x, &x, l_fixed)?;
        let g_y = oracle.eval(&y)?;
        let x_next = setup.prox_map(&g_y, &x, l_fixed)?;
        calls += 2;
        prox_calls += 2;
        sums.push(weight, &y, &g_y);
        trace.push(IterationRecord {
            k,
            l_accepted: l_fixed,
            inner_trials: 1,
            weight,
            cumulative_s: sums.s,
            oracle_calls_so_far: calls,
            iterate: record_trace.then(|| IterateSnapshot { y, x_next: x_next.clone(), g_y }),
        });
        x = x_next;
    }

    let certificate_residual_max = certificate_residual(setup, &sums, &x0, &x, 0.0, 0)?;
    Ok(SolveResult {
        method: Method::Fixed,
        status: Status::Converged,
        iterations,
        s_n: sums.s,
        y_tilde: sums.average().unwrap_or_else(|| x.clone()),
        x0,
        x_final: x,
        trace,
        r_sq_used: setup.prox_radius_sq(),
        r_sq_diameter: setup.bregman_diameter_sq(),
        l0: l_fixed,
        epsilon: None,
        slack: 0.0,
        oracle_calls: calls,
        prox_calls,
        sums,
        certificate_residual_max,
    })
}

struct LoopSpec {
    method: Method,
    slack: f64,
    stop_at: f64,
}

fn check_dims(oracle_dim: usize, setup: &ProxSetup) -> Result<(), SolverError> {
    if oracle_dim != setup.dim() {
        return Err(SolverError::Dimension { oracle: oracle_dim, setup: setup.dim() });
    }
    Ok(())
}

fn resolve_l0(oracle: &FieldOracle, setup: &ProxSetup, config: &SolverConfig) -> Result<f64, SolverError> {
    Ok(match config.l0 {
        InitialL::Fixed(l) => l,
        InitialL::Auto => estimate_l0(oracle, setup, config.l0_seed)?,
    })
}

fn run_adaptive<O: Oracle>(
    oracle: &O,
    setup: &ProxSetup,
    config: &SolverConfig,
    l0: f64,
    r_sq: f64,
    spec: LoopSpec,
) -> Result<SolveResult, SolverError> {
    let x0 = setup.prox_center();
    let mut x = x0.clone();
    let mut sums = WeightedSums::new(x.len());
    let mut trace = Vec::new();
    // counted per run so that a shared oracle cannot skew the accounting
    let mut calls = 0u64;
    let mut prox_calls = 0u64;
    let mut l_prev = l0;
    let mut status = Status::MaxOuterReached;

    'outer: for k in 0..config.max_outer {
        let g_x = oracle.query(&x)?;
        calls += 1;
        let mut l = (l_prev / 2.0).max(config.l_floor);
        let mut trials = 0;
        let (y, g_y, x_next) = loop {
            if trials == config.max_backtracks_per_iter {
                status = Status::BacktrackExhausted;
                break 'outer;
            }
            trials += 1;
            let y = setup.prox_map(&g_x, &x, l)?;
            let g_y = oracle.query(&y)?;
            calls += 1;
            let x_next = setup.prox_map(&g_y, &x, l)?;
            prox_calls += 2;
            if check_criterion(setup, &g_y, &g_x, &y, &x_next, &x, l, spec.slack)? {
                break (y, g_y, x_next);
            }
            l *= 2.0;
        };

        let weight = 1.0 / l;
        sums.push(weight, &y, &g_y);
        trace.push(IterationRecord {
            k,
            l_accepted: l,
            inner_trials: trials,
            weight,
            cumulative_s: sums.s,
            oracle_calls_so_far: calls,
            iterate: config.record_trace.then(|| IterateSnapshot { y, x_next: x_next.clone(), g_y }),
        });
        x = x_next;
        l_prev = l;

        if sums.s >= spec.stop_at {
            status = Status::Converged;
            break;
        }
    }

    let certificate_residual_max = certificate_residual(setup, &sums, &x0, &x, spec.slack, config.probe_seed)?;
    Ok(SolveResult {
        method: spec.method,
        status,
        iterations: trace.len(),
        s_n: sums.s,
        y_tilde: sums.average().unwrap_or_else(|| x.clone()),
        x0,
        x_final: x,
        trace,
        r_sq_used: r_sq,
        r_sq_diameter: setup.bregman_diameter_sq(),
        l0,
        epsilon: Some(config.epsilon),
        slack: spec.slack,
        oracle_calls: calls,
        prox_calls,
        sums,
        certificate_residual_max,
    })
}

/// Max over probes of `sum w <g(y), y - x> - (V(x, x0) - V(x, x^N)) - S slack`.
fn certificate_residual(
    setup: &ProxSetup,
    sums: &WeightedSums,
    x0: &[f64],
    x_final: &[f64],
    slack: f64,
    seed: u64,
) -> Result<f64, SolverError> {
    let probes = setup.set().probe_points(PROBE_VERTEX_LIMIT, PROBE_RANDOM_POINTS, seed);
    let mut worst = f64::NEG_INFINITY;
    for p in &probes {
        let lhs = sums.functional_at(p);
        let rhs = setup.bregman(p, x0)? - setup.bregman(p, x_final)? + sums.s * slack;
        worst = worst.max(lhs - rhs);
    }
    Ok(worst)
}
