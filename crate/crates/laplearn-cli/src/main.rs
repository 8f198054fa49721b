//! Command-line front end for the Laplacian graph-learning library.
//!
//! Three subcommands cover the experiment workflow: `synthetic` runs a
//! Monte Carlo sweep over regularization levels and sample sizes from a
//! JSON config, `fit` learns a single graph from a CSV data matrix, and
//! `plot-tables` condenses a results file into plot-ready summary tables.

mod config;
mod error;
mod run;
mod tables;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use laplearn::io::Orientation;
use laplearn::penalty::PenaltyKind;
use laplearn::solver::{InitStrategy, SolverOptions};

use crate::config::{ExperimentConfig, PenaltyConfig};
use crate::error::Result;
use crate::run::{run_data, run_synthetic, FitRequest};
use crate::tables::emit_plot_tables;

#[derive(Parser)]
#[command(
    name = "laplearn",
    version,
    about = "Learn sparse connected-graph Laplacians from data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo synthetic sweep described by a JSON config.
    Synthetic(SyntheticArgs),
    /// Fit one graph to a CSV data matrix.
    Fit(FitArgs),
    /// Condense a results CSV into per-metric plot tables.
    PlotTables(PlotTablesArgs),
}

#[derive(Args)]
struct SyntheticArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Results CSV path; overrides the config's output_path.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads across realizations (0 = one per core).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Report 0 in the ms column so output bytes are reproducible.
    #[arg(long)]
    deterministic_timing: bool,
}

#[derive(Args)]
struct FitArgs {
    /// CSV data matrix (numeric; an optional header row is detected).
    #[arg(long)]
    input: PathBuf,
    /// Whether CSV rows are variables or observations.
    #[arg(long, default_value_t = Orientation::RowsAreVariables)]
    orientation: Orientation,
    /// Fit on the sample correlation matrix instead of the covariance.
    #[arg(long)]
    correlation: bool,
    /// Subtract each variable's mean before forming the covariance.
    #[arg(long)]
    center: bool,
    /// Penalty family.
    #[arg(long, default_value_t = PenaltyKind::Mcp)]
    penalty: PenaltyKind,
    /// Regularization level.
    #[arg(long)]
    lambda: f64,
    /// Concavity parameter (defaults per penalty family).
    #[arg(long)]
    gamma: Option<f64>,
    /// Initial point strategy.
    #[arg(long, default_value_t = InitStrategy::Dense)]
    init: InitStrategy,
    /// Initial projected-gradient step size.
    #[arg(long, default_value_t = SolverOptions::default().eta0)]
    eta0: f64,
    /// Backtracking shrink factor in (0, 1).
    #[arg(long, default_value_t = SolverOptions::default().beta)]
    beta: f64,
    /// Relative step tolerance of the inner solver.
    #[arg(long, default_value_t = SolverOptions::default().tol_inner)]
    tol_inner: f64,
    /// Inner iteration cap per subproblem.
    #[arg(long, default_value_t = SolverOptions::default().max_inner)]
    max_inner: usize,
    /// Relative change tolerance of the outer loop.
    #[arg(long, default_value_t = SolverOptions::default().tol_outer)]
    tol_outer: f64,
    /// Outer iteration cap.
    #[arg(long, default_value_t = SolverOptions::default().max_outer)]
    max_outer: usize,
    /// Weights at or below this are left out of the edge list.
    #[arg(long, default_value_t = SolverOptions::default().edge_threshold)]
    edge_threshold: f64,
    /// Output edge-list CSV path.
    #[arg(long)]
    output: PathBuf,
    /// JSON run summary path (default: output with a .summary.json suffix).
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Report 0 ms so the summary bytes are reproducible.
    #[arg(long)]
    deterministic_timing: bool,
}

#[derive(Args)]
struct PlotTablesArgs {
    /// Results CSV written by the synthetic subcommand.
    #[arg(long)]
    results: PathBuf,
    /// Directory for the six summary tables (created if missing).
    #[arg(long)]
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synthetic(args) => synthetic(args),
        Command::Fit(args) => fit(args),
        Command::PlotTables(args) => plot_tables(args),
    }
}

fn synthetic(args: SyntheticArgs) -> Result<()> {
    let mut config = ExperimentConfig::from_file(&args.config)?;
    if args.deterministic_timing {
        config.deterministic_timing = true;
    }
    let artifacts = run_synthetic(&config, args.threads, args.output.as_deref())?;
    println!(
        "wrote {} ({} rows, {} failed) and {}",
        artifacts.results_path.display(),
        artifacts.n_rows,
        artifacts.n_failed,
        artifacts.aggregate_path.display()
    );
    Ok(())
}

fn fit(args: FitArgs) -> Result<()> {
    let request = FitRequest {
        input: args.input,
        orientation: args.orientation,
        correlation: args.correlation,
        center: args.center,
        penalty: PenaltyConfig {
            kind: args.penalty,
            gamma: args.gamma,
        },
        lambda: args.lambda,
        init: args.init,
        solver: SolverOptions {
            eta0: args.eta0,
            beta: args.beta,
            tol_inner: args.tol_inner,
            max_inner: args.max_inner,
            tol_outer: args.tol_outer,
            max_outer: args.max_outer,
            edge_threshold: args.edge_threshold,
            record_iterates: false,
        },
        output: args.output,
        summary_path: args.summary,
        deterministic_timing: args.deterministic_timing,
    };
    let artifacts = run_data(&request)?;
    println!(
        "fitted p = {}, n = {}: {} edges ({}) -> {} (summary {})",
        artifacts.p,
        artifacts.n,
        artifacts.n_edges,
        artifacts.status,
        artifacts.output.display(),
        artifacts.summary_path.display()
    );
    Ok(())
}

fn plot_tables(args: PlotTablesArgs) -> Result<()> {
    let artifacts = emit_plot_tables(&args.results, &args.out_dir)?;
    println!(
        "wrote {} tables to {} ({} cells from {} rows, {} skipped)",
        artifacts.files.len(),
        args.out_dir.display(),
        artifacts.n_cells,
        artifacts.n_rows_used,
        artifacts.n_rows_skipped
    );
    Ok(())
}
