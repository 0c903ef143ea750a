//! `baxg` — benchmark harness for bilinear minimax solvers.
//!
//! Exit codes: 0 success, 2 configuration error, 3 solver soft failure
//! (outputs still written), 4 i/o error.

use baxg_cli::csvio::{emit_csv, parse_csv, RunLabel};
use baxg_cli::generate::{generate_problem, AlgoKind, ExperimentConfig, GroundTruth, ProblemKind};
use baxg_cli::run::{
    lad_reference, rebase_lad_rows, run_on_instance, sweep_on_instance, HarnessError, RunOutput,
};
use baxg_cli::svg::emit_svg;
use baxg_cli::verify_cmd::run_verification;
use baxg_core::verify::check_gap_inequality;
use baxg_core::{CkVariant, SubsolverChoice};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "baxg",
    about = "Bilinear accelerated extragradient benchmark harness",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ProblemArgs {
    /// Problem family: smoothed-l1-eq, lad, or quadratic-lagrangian.
    #[arg(long, default_value = "smoothed-l1-eq")]
    problem: ProblemKind,
    /// Primal dimension.
    #[arg(long, default_value_t = 1000)]
    d: usize,
    /// Dual dimension (at most d).
    #[arg(long, default_value_t = 500)]
    n: usize,
    /// Objective scale of the smoothed-l1 term.
    #[arg(long, default_value_t = 1e-4)]
    lambda: f64,
    /// Sharpness of the smoothed-l1 surrogate.
    #[arg(long, default_value_t = 1e6)]
    a: f64,
    /// RNG seed; fixes the instance bit-for-bit.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Support density of the planted sparse solution (smoothed-l1-eq).
    #[arg(long, default_value_t = 0.1)]
    density: f64,
}

#[derive(Args, Clone)]
struct SolveArgs {
    /// Algorithm: baxg or eg.
    #[arg(long, default_value = "baxg")]
    algo: AlgoKind,
    /// Inner solver for baxg: auto, pagd, direct, or cg.
    #[arg(long, default_value = "auto")]
    subsolver: String,
    /// Extended-oracle budget.
    #[arg(long, default_value_t = 20_000)]
    max_oracle: u64,
    /// Relative-residual tolerance of the cg subsolver.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Record per-iteration inequality instrumentation during the run.
    #[arg(long)]
    instrument: bool,
    /// Prox-weight variant handed to the subproblem: schedule or loose.
    #[arg(long, default_value = "schedule")]
    ck_variant: String,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance and write its summary as JSON.
    Generate {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Output path for the JSON summary.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one algorithm at one Lipschitz value; write the trace CSV.
    Run {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        solve: SolveArgs,
        /// Smoothness constant for the schedule (default: analytic bound).
        #[arg(long)]
        lipschitz: Option<f64>,
        /// Output path for the trace CSV.
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep the Lipschitz grid, write the best trace CSV, print a table.
    Sweep {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        solve: SolveArgs,
        /// Comma-separated Lipschitz grid (default 1e-5..1e3 by decades).
        #[arg(long, value_delimiter = ',')]
        lipschitz_grid: Vec<f64>,
        /// Output path for the best trace CSV.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the verification table and exit nonzero on any failure.
    Verify {
        /// Seed for the randomized checks.
        #[arg(long, default_value_t = 2984)]
        seed: u64,
    },
    /// Plot one or more trace CSVs as a log-scale SVG chart.
    Plot {
        /// Output path for the SVG.
        #[arg(long)]
        out: PathBuf,
        /// Chart title.
        #[arg(long, default_value = "merit vs oracle accesses")]
        title: String,
        /// Trace CSV files.
        #[arg(required = true)]
        traces: Vec<PathBuf>,
    },
}

fn parse_subsolver(text: &str, tol: f64) -> Result<SubsolverChoice, String> {
    match text {
        "auto" => Ok(SubsolverChoice::Auto),
        "pagd" => Ok(SubsolverChoice::Pagd),
        "direct" => Ok(SubsolverChoice::Direct),
        "cg" => Ok(SubsolverChoice::Cg { tol }),
        other => Err(format!(
            "unknown subsolver '{other}' (expected auto, pagd, direct, cg)"
        )),
    }
}

fn parse_ck_variant(text: &str) -> Result<CkVariant, String> {
    match text {
        "schedule" => Ok(CkVariant::ScheduleWeight),
        "loose" => Ok(CkVariant::LooseConstant),
        other => Err(format!(
            "unknown ck variant '{other}' (expected schedule or loose)"
        )),
    }
}

fn build_config(
    problem: &ProblemArgs,
    solve: &SolveArgs,
    lipschitz: Option<f64>,
    grid: &[f64],
) -> Result<ExperimentConfig, String> {
    let mut cfg = ExperimentConfig::new(problem.problem, problem.d, problem.n, problem.seed);
    cfg.lambda = problem.lambda;
    cfg.sharpness = problem.a;
    cfg.density = problem.density;
    cfg.algo = solve.algo;
    cfg.subsolver = parse_subsolver(&solve.subsolver, solve.tol)?;
    cfg.max_oracle = solve.max_oracle;
    cfg.cg_tol = solve.tol;
    cfg.instrument = solve.instrument;
    cfg.ck_variant = parse_ck_variant(&solve.ck_variant)?;
    cfg.lipschitz = lipschitz;
    if !grid.is_empty() {
        cfg.lipschitz_grid = grid.to_vec();
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Serialize)]
struct InstanceSummary {
    problem: String,
    d: usize,
    n: usize,
    lambda: f64,
    sharpness: f64,
    seed: u64,
    density: f64,
    sigma_min: f64,
    sigma_max: f64,
    column_norm_mean_sq: f64,
    analytic_smoothness: f64,
    regenerated: u32,
    ground_truth: GroundTruthSummary,
}

#[derive(Serialize)]
#[serde(tag = "kind")]
enum GroundTruthSummary {
    #[serde(rename = "smoothed-l1-eq")]
    SmoothedL1Eq { support_size: usize, rhs_norm: f64 },
    #[serde(rename = "lad")]
    Lad { rhs_norm: f64 },
    #[serde(rename = "quadratic-lagrangian")]
    QuadraticLagrangian { saddle_norm: f64 },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn default_solve_args() -> SolveArgs {
    SolveArgs {
        algo: AlgoKind::Baxg,
        subsolver: "auto".into(),
        max_oracle: 20_000,
        tol: 1e-10,
        instrument: false,
        ck_variant: "schedule".into(),
    }
}

fn cmd_generate(problem: &ProblemArgs, out: &Path) -> Result<u8, HarnessError> {
    let cfg =
        build_config(problem, &default_solve_args(), None, &[]).map_err(HarnessError::Config)?;
    let generated = generate_problem(&cfg);
    let a = generated.problem.coupling.matrix();
    let mut total = 0.0;
    for j in 0..a.cols() {
        for i in 0..a.rows() {
            total += a.get(i, j) * a.get(i, j);
        }
    }
    let ground_truth = match &generated.ground_truth {
        GroundTruth::SmoothedL1Eq { w_star, b } => GroundTruthSummary::SmoothedL1Eq {
            support_size: w_star.iter().filter(|x| **x != 0.0).count(),
            rhs_norm: baxg_core::linalg::norm(b),
        },
        GroundTruth::Lad { b } => GroundTruthSummary::Lad {
            rhs_norm: baxg_core::linalg::norm(b),
        },
        GroundTruth::QuadraticLagrangian { saddle } => GroundTruthSummary::QuadraticLagrangian {
            saddle_norm: saddle.norm(),
        },
    };
    let summary = InstanceSummary {
        problem: cfg.problem.to_string(),
        d: cfg.d,
        n: cfg.n,
        lambda: cfg.lambda,
        sharpness: cfg.sharpness,
        seed: cfg.seed,
        density: cfg.density,
        sigma_min: generated.problem.coupling.sigma_min(),
        sigma_max: generated.problem.coupling.sigma_max(),
        column_norm_mean_sq: total / a.cols() as f64,
        analytic_smoothness: generated.problem.potential.smoothness_constant(),
        regenerated: generated.regenerated,
        ground_truth,
    };
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    std::fs::write(out, json).map_err(io_err(out))?;
    println!("wrote instance summary to {}", out.display());
    Ok(0)
}

/// For the LAD family, convert raw-objective merits into gaps against a
/// long reference run at the same Lipschitz value.
fn finalize_lad(
    cfg: &ExperimentConfig,
    generated: &baxg_cli::generate::GeneratedProblem,
    output: &mut RunOutput,
) -> Result<(), HarnessError> {
    if matches!(cfg.problem, ProblemKind::Lad) {
        let (_, reference_objective) = lad_reference(cfg, generated, output.lipschitz)?;
        rebase_lad_rows(&mut output.trace, reference_objective);
    }
    Ok(())
}

fn cmd_run(
    problem: &ProblemArgs,
    solve: &SolveArgs,
    lipschitz: Option<f64>,
    out: &Path,
) -> Result<u8, HarnessError> {
    let cfg = build_config(problem, solve, lipschitz, &[]).map_err(HarnessError::Config)?;
    let generated = generate_problem(&cfg);
    let effective = cfg
        .lipschitz
        .unwrap_or_else(|| generated.problem.potential.smoothness_constant());
    let mut output = run_on_instance(&cfg, &generated, effective)?;
    finalize_lad(&cfg, &generated, &mut output)?;
    let label = RunLabel {
        algorithm: cfg.algo.to_string(),
        problem: cfg.problem.to_string(),
        seed: cfg.seed,
        lambda: cfg.lambda,
    };
    emit_csv(&label, &output.trace, out).map_err(io_err(out))?;
    println!(
        "{}: L = {:.3e}, {} rows, final merit {:.6e}, {} oracle accesses, {} soft failures",
        cfg.algo,
        output.lipschitz,
        output.trace.rows.len(),
        output.trace.final_merit(),
        output.trace.final_oracle_total(),
        output.trace.soft_failures,
    );
    if cfg.instrument {
        print_instrumentation_summary(&generated.problem, &output);
    }
    Ok(if output.trace.soft_failures > 0 { 3 } else { 0 })
}

fn print_instrumentation_summary(problem: &baxg_core::BilinearMinimaxProblem, output: &RunOutput) {
    if let Some(log) = &output.trace.instrumentation {
        let worst_error = log
            .error_terms
            .iter()
            .zip(&log.error_scales)
            .map(|(e, s)| e - 1e-8 * (1.0 + s))
            .fold(f64::NEG_INFINITY, f64::max);
        let worst_cond = log
            .cond_margins
            .iter()
            .zip(&log.cond_scales)
            .map(|(m, s)| m - 1e-8 * (1.0 + s))
            .fold(f64::NEG_INFINITY, f64::max);
        println!(
            "instrumentation: {} iterations, worst error-term excess {:.3e}, worst condition excess {:.3e}",
            log.iterates.len(),
            worst_error,
            worst_cond
        );
        // Restricted gap over the probe ball, and whether the gap
        // inequality held at the schedule's smoothness constant.
        let report = check_gap_inequality(&output.trace, problem, &log.probes, 1e-6);
        if let Some(last) = report.entries.last() {
            println!(
                "restricted probe gap at k={}: {:.6e} (bound {:.6e}); gap inequality {} ({} of {} iterations violate)",
                last.iteration,
                last.max_gap,
                last.max_bound,
                if report.pass() { "holds" } else { "VIOLATED" },
                report.failures(),
                report.entries.len()
            );
        }
    }
}

fn cmd_sweep(
    problem: &ProblemArgs,
    solve: &SolveArgs,
    grid: &[f64],
    out: &Path,
) -> Result<u8, HarnessError> {
    let cfg = build_config(problem, solve, None, grid).map_err(HarnessError::Config)?;
    let generated = generate_problem(&cfg);
    let mut output = sweep_on_instance(&cfg, &generated)?;

    println!(
        "{:>12}  {:>14}  {:>12}  {:>6}",
        "lipschitz", "final merit", "oracle", "soft"
    );
    for run in &output.runs {
        println!(
            "{:>12.3e}  {:>14.6e}  {:>12}  {:>6}",
            run.lipschitz,
            run.trace.final_merit(),
            run.trace.final_oracle_total(),
            run.trace.soft_failures
        );
    }
    let best = output.best;
    let mut best_run = output.runs.swap_remove(best);
    finalize_lad(&cfg, &generated, &mut best_run)?;
    println!(
        "best: L = {:.3e} with final merit {:.6e}",
        best_run.lipschitz,
        best_run.trace.final_merit()
    );
    let label = RunLabel {
        algorithm: cfg.algo.to_string(),
        problem: cfg.problem.to_string(),
        seed: cfg.seed,
        lambda: cfg.lambda,
    };
    emit_csv(&label, &best_run.trace, out).map_err(io_err(out))?;
    Ok(if best_run.trace.soft_failures > 0 {
        3
    } else {
        0
    })
}

fn cmd_plot(out: &Path, title: &str, traces: &[PathBuf]) -> Result<u8, HarnessError> {
    let mut series = Vec::with_capacity(traces.len());
    for path in traces {
        let content = std::fs::read_to_string(path).map_err(io_err(path))?;
        let parsed = parse_csv(&content)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        series.push(parsed);
    }
    emit_svg(&series, title, out).map_err(io_err(out))?;
    println!(
        "wrote chart with {} series to {}",
        series.len(),
        out.display()
    );
    Ok(0)
}

fn dispatch(cli: Cli) -> Result<u8, HarnessError> {
    match &cli.command {
        Command::Generate { problem, out } => cmd_generate(problem, out),
        Command::Run {
            problem,
            solve,
            lipschitz,
            out,
        } => cmd_run(problem, solve, *lipschitz, out),
        Command::Sweep {
            problem,
            solve,
            lipschitz_grid,
            out,
        } => cmd_sweep(problem, solve, lipschitz_grid, out),
        Command::Verify { seed } => Ok(if run_verification(*seed) { 0 } else { 1 }),
        Command::Plot { out, title, traces } => cmd_plot(out, title, traces),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                HarnessError::Config(_) | HarnessError::Solver(_) => 2,
                HarnessError::Io { .. } => 4,
            };
            ExitCode::from(code)
        }
    }
}
