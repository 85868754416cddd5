use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use adaprox::harness::{
    compare_solvers, format_table, load_trace, run_experiment, sums_from_trace, ExperimentConfig, SolverKind,
};
use adaprox::problems::{certify_sums, GapReport};
use adaprox::solver::{
    holder_iteration_bound, inexact_iteration_bound, lipschitz_iteration_bound, HolderBound, Status,
};

/// Exit code for runs that finished without converging.
const NOT_CONVERGED: u8 = 2;

#[derive(Parser)]
#[command(name = "adaprox", version, about = "Adaptive mirror-prox experiments for variational inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every repetition of an experiment and print the summaries as JSON.
    Solve { config: PathBuf },
    /// Run several solver variants on the same instance and print a table.
    Bench {
        config: PathBuf,
        /// Variants such as `adaptive:l0_scale=1000` or `fixed:l=known,iterations=bound`.
        #[arg(long, num_args = 2.., required = true)]
        variants: Vec<String>,
        /// Print the rows as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Recompute gap certificates from a stored trace.
    Certify {
        trace: PathBuf,
        config: PathBuf,
        /// Iterate sidecar; defaults to the trace path with `.iterates.bin`.
        #[arg(long)]
        iterates: Option<PathBuf>,
        /// Repetition whose instance produced the trace.
        #[arg(long, default_value_t = 0)]
        repetition: usize,
    },
    /// Print the a-priori iteration bounds for an experiment.
    Bound {
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        repetition: usize,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let summaries = run_experiment(&cfg).with_context(|| format!("running {}", config.display()))?;
            println!("{}", serde_json::to_string_pretty(&summaries)?);
            Ok(exit_for(summaries.iter().map(|s| s.status)))
        }
        Command::Bench { config, variants, json } => {
            let cfg = ExperimentConfig::load(&config)?;
            let rows = compare_solvers(&cfg, &variants).with_context(|| format!("running {}", config.display()))?;
            if json {
                println!("{}", serde_json::to_string_pretty(&rows)?);
            } else {
                print!("{}", format_table(&rows));
            }
            Ok(exit_for(rows.iter().map(|r| r.status)))
        }
        Command::Certify { trace, config, iterates, repetition } => {
            let cfg = ExperimentConfig::load(&config)?;
            let iterates = iterates.unwrap_or_else(|| sidecar_for(&trace));
            let records = load_trace(&trace, Some(&iterates))?;
            let sums = sums_from_trace(&records)?;
            let instance = cfg.build_instance(repetition)?;
            let report = certify_sums(&sums, &instance)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&Certificate { iterations: records.len(), s_n: sums.s, gaps: report })?
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Bound { config, repetition } => {
            let cfg = ExperimentConfig::load(&config)?;
            println!("{}", serde_json::to_string_pretty(&bounds(&cfg, repetition)?)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn exit_for(statuses: impl Iterator<Item = Status>) -> ExitCode {
    let mut all = true;
    for s in statuses {
        all &= s == Status::Converged;
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(NOT_CONVERGED)
    }
}

fn sidecar_for(trace: &Path) -> PathBuf {
    let name = trace.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
    let stem = name.strip_suffix(".trace.csv").or_else(|| name.strip_suffix(".csv")).unwrap_or(&name);
    trace.with_file_name(format!("{stem}.iterates.bin"))
}

#[derive(Serialize)]
struct Certificate {
    iterations: usize,
    s_n: f64,
    #[serde(flatten)]
    gaps: GapReport,
}

#[derive(Serialize)]
struct Bounds {
    solver: SolverKind,
    epsilon: f64,
    r_sq: f64,
    known_l: Option<f64>,
    /// Bound for the configured solver, when one exists.
    iterations: Option<u64>,
    lipschitz: Option<u64>,
    inexact: Option<u64>,
    holder: Option<HolderBound>,
}

fn bounds(cfg: &ExperimentConfig, rep: usize) -> Result<Bounds> {
    let inst = cfg.build_instance(rep)?;
    let eps = cfg.solver.epsilon;
    let r_sq = inst.setup.prox_radius_sq();
    let known = inst.known_l.filter(|l| *l > 0.0);
    let lipschitz = known.map(|l| lipschitz_iteration_bound(l, r_sq, eps));
    let inexact = known.map(|l| inexact_iteration_bound(l, r_sq, eps));
    let holder = if inst.oracle.holder.is_empty() {
        None
    } else {
        Some(holder_iteration_bound(&inst.oracle.holder, r_sq.sqrt(), eps)?)
    };
    let iterations = match cfg.solver.kind {
        SolverKind::Adaptive => lipschitz.or(holder.map(|h| h.iterations)),
        SolverKind::AdaptiveInexact => inexact,
        SolverKind::Fixed => match (cfg.solver.fixed_iterations, cfg.solver.fixed_l.or(known)) {
            (Some(n), _) => Some(n as u64),
            (None, Some(l)) => Some(lipschitz_iteration_bound(l, r_sq, eps)),
            (None, None) => bail!("fixed solver needs `fixed_l` or an instance with known L"),
        },
    };
    Ok(Bounds { solver: cfg.solver.kind, epsilon: eps, r_sq, known_l: inst.known_l, iterations, lipschitz, inexact, holder })
}
