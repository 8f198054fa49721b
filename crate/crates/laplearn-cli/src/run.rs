//! Experiment execution: the Monte Carlo synthetic sweep and the
//! real-data fit.
//!
//! Determinism contract: given the same config (including
//! `deterministic_timing = true`) and base seed, the output files are
//! byte-identical regardless of `--threads`. Realizations are dispatched
//! to a worker pool, but every cell derives its randomness from
//! `(base_seed, realization, sample-set index)` and results are merged by
//! realization index, so scheduling cannot leak into the output.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use laplearn::io::{read_data_matrix, read_edge_list_csv, write_edge_list_csv, Orientation};
use laplearn::metrics::{count_edges, evaluate};
use laplearn::model::{
    correlation_matrix, derive_seed, generate_ba_tree, generate_modular, sample_covariance,
    sample_lgmrf, GroundTruthGraph,
};
use laplearn::solver::{initial_point, ngl, ConvergenceStatus, InitStrategy, SolverOptions};
use laplearn::DMatrix;

use crate::config::{ExperimentConfig, GraphConfig, PenaltyConfig};
use crate::error::{CliError, Result};

/// One line of the results table: a single fit on a single realization.
#[derive(Clone, Debug)]
pub struct ResultRow {
    pub realization: usize,
    pub lambda: f64,
    pub n_over_p: f64,
    pub n_edges: usize,
    pub re: f64,
    pub fs: f64,
    pub outer_iters: usize,
    pub inner_iters: usize,
    pub status: ConvergenceStatus,
    pub ms: u128,
}

/// Exact header of the results CSV.
pub const RESULTS_HEADER: &str =
    "realization,lambda,n_over_p,n_edges,re,fs,outer_iters,inner_iters,status,ms";

impl ResultRow {
    fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            self.realization,
            self.lambda,
            self.n_over_p,
            self.n_edges,
            self.re,
            self.fs,
            self.outer_iters,
            self.inner_iters,
            self.status,
            self.ms
        )
    }

    /// Placeholder row for a cell whose graph or sample generation failed;
    /// metrics are NaN so downstream aggregation skips it.
    fn failed(realization: usize, lambda: f64, n_over_p: f64) -> Self {
        Self {
            realization,
            lambda,
            n_over_p,
            n_edges: 0,
            re: f64::NAN,
            fs: f64::NAN,
            outer_iters: 0,
            inner_iters: 0,
            status: ConvergenceStatus::NumericalFailure,
            ms: 0,
        }
    }
}

/// Paths and tallies returned by [`run_synthetic`].
pub struct SyntheticArtifacts {
    pub results_path: PathBuf,
    pub aggregate_path: PathBuf,
    pub n_rows: usize,
    pub n_failed: usize,
}

/// Runs the full synthetic sweep and writes the results and aggregate
/// CSVs.
///
/// `threads` bounds the worker pool (0 means the library default). A
/// numerical failure in one cell is recorded in that row's status column
/// and never aborts the sweep.
pub fn run_synthetic(
    config: &ExperimentConfig,
    threads: usize,
    output_override: Option<&Path>,
) -> Result<SyntheticArtifacts> {
    config.validate()?;
    let results_path = match output_override.or(config.output_path.as_deref()) {
        Some(p) => p.to_path_buf(),
        None => return Err(CliError::MissingOutputPath),
    };

    // A file-based ground truth is fixed across realizations; read it once
    // so a bad file fails fast.
    let fixed_graph = match &config.graph {
        GraphConfig::FromFile { path } => Some(GroundTruthGraph::from_weights(
            read_edge_list_csv(path, config.p)?,
        )?),
        _ => None,
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::InvalidConfig(format!("thread pool: {e}")))?;
    let per_realization: Vec<Vec<ResultRow>> = pool.install(|| {
        (0..config.n_realizations)
            .into_par_iter()
            .map(|r| run_realization(config, fixed_graph.as_ref(), r))
            .collect()
    });

    let rows: Vec<ResultRow> = per_realization.into_iter().flatten().collect();
    let n_failed = rows
        .iter()
        .filter(|row| row.status == ConvergenceStatus::NumericalFailure)
        .count();

    let mut out = String::from(RESULTS_HEADER);
    out.push('\n');
    for row in &rows {
        out.push_str(&row.to_csv_line());
    }
    std::fs::write(&results_path, out).map_err(|e| CliError::io(&results_path, e))?;

    let aggregate_path = aggregate_path_for(&results_path);
    let aggregate = aggregate_csv(config, &rows);
    std::fs::write(&aggregate_path, aggregate).map_err(|e| CliError::io(&aggregate_path, e))?;

    Ok(SyntheticArtifacts {
        results_path,
        aggregate_path,
        n_rows: rows.len(),
        n_failed,
    })
}

/// `results.csv` -> `results_aggregate.csv` (same directory).
pub fn aggregate_path_for(results_path: &Path) -> PathBuf {
    let stem = results_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "results".to_string());
    results_path.with_file_name(format!("{stem}_aggregate.csv"))
}

/// All fits for one realization, in `(n_over_p, lambda)` order. Always
/// returns exactly `n_over_p.len() * lambda.len()` rows; failures become
/// placeholder rows.
fn run_realization(
    config: &ExperimentConfig,
    fixed_graph: Option<&GroundTruthGraph>,
    r: usize,
) -> Vec<ResultRow> {
    let all_failed = |config: &ExperimentConfig| -> Vec<ResultRow> {
        let mut rows = Vec::new();
        for &q in &config.n_over_p {
            for &l in &config.lambda {
                rows.push(ResultRow::failed(r, l, q));
            }
        }
        rows
    };

    let graph = match fixed_graph {
        Some(g) => g.clone(),
        None => {
            let seed = derive_seed(config.base_seed, &[r as u64, 0]);
            let generated = match config.graph {
                GraphConfig::BaTree => generate_ba_tree(config.p, config.weight_range, seed),
                GraphConfig::Modular {
                    n_modules,
                    p_intra,
                    p_inter,
                } => generate_modular(
                    config.p,
                    n_modules,
                    p_intra,
                    p_inter,
                    config.weight_range,
                    seed,
                ),
                GraphConfig::FromFile { .. } => unreachable!("handled by fixed_graph"),
            };
            match generated {
                Ok(g) => g,
                Err(_) => return all_failed(config),
            }
        }
    };

    let mut rows = Vec::with_capacity(config.n_over_p.len() * config.lambda.len());
    for (qi, &q) in config.n_over_p.iter().enumerate() {
        let n = config.samples_for(q);
        let sample_seed = derive_seed(config.base_seed, &[r as u64, 1 + qi as u64]);
        let covariance = match sample_lgmrf(&graph, n, sample_seed) {
            Ok(set) => set.covariance().clone(),
            Err(_) => {
                for &l in &config.lambda {
                    rows.push(ResultRow::failed(r, l, q));
                }
                continue;
            }
        };
        for &l in &config.lambda {
            rows.push(fit_cell(config, &graph, &covariance, r, q, l));
        }
    }
    rows
}

/// One (realization, n/p, lambda) fit, with failures captured in the row.
fn fit_cell(
    config: &ExperimentConfig,
    graph: &GroundTruthGraph,
    covariance: &DMatrix<f64>,
    r: usize,
    q: f64,
    lambda: f64,
) -> ResultRow {
    let started = Instant::now();
    let fitted = config
        .penalty
        .spec(lambda)
        .and_then(|penalty| {
            let w0 = initial_point(config.init, Some(covariance), config.p)?;
            Ok(ngl(covariance, &penalty, &config.solver, &w0)?)
        })
        .and_then(|report| {
            let eval = evaluate(
                &report.w_hat,
                graph.weights(),
                config.solver.edge_threshold,
            )?;
            Ok((report, eval))
        });
    let ms = if config.deterministic_timing {
        0
    } else {
        started.elapsed().as_millis()
    };

    match fitted {
        Ok((report, eval)) => ResultRow {
            realization: r,
            lambda,
            n_over_p: q,
            n_edges: eval.n_edges_hat,
            re: eval.relative_error,
            fs: eval.f_score,
            outer_iters: report.outer_iters(),
            inner_iters: report.total_inner_iters(),
            status: report.status,
            ms,
        },
        Err(_) => ResultRow {
            ms,
            ..ResultRow::failed(r, lambda, q)
        },
    }
}

/// Builds the aggregate CSV: one row per `(n_over_p, lambda)` config cell
/// (in config-list order), with mean and sample standard deviation over
/// the realizations whose fit produced finite metrics.
fn aggregate_csv(config: &ExperimentConfig, rows: &[ResultRow]) -> String {
    let n_l = config.lambda.len();
    let n_q = config.n_over_p.len();
    let per_real = n_l * n_q;
    let mut out =
        String::from("lambda,n_over_p,count,edges_mean,edges_std,re_mean,re_std,fs_mean,fs_std\n");
    for qi in 0..n_q {
        for li in 0..n_l {
            let cells = (0..config.n_realizations)
                .map(|r| &rows[r * per_real + qi * n_l + li])
                .filter(|row| {
                    row.status != ConvergenceStatus::NumericalFailure
                        && row.re.is_finite()
                        && row.fs.is_finite()
                });
            let mut edges = Vec::new();
            let mut re = Vec::new();
            let mut fs = Vec::new();
            for row in cells {
                edges.push(row.n_edges as f64);
                re.push(row.re);
                fs.push(row.fs);
            }
            let (em, es) = mean_std(&edges);
            let (rm, rs) = mean_std(&re);
            let (fm, fsd) = mean_std(&fs);
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                config.lambda[li],
                config.n_over_p[qi],
                edges.len(),
                em,
                es,
                rm,
                rs,
                fm,
                fsd
            ));
        }
    }
    out
}

/// Mean and sample standard deviation (n-1 denominator; 0 when fewer than
/// two values, NaN mean when empty).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Everything the `fit` subcommand needs.
pub struct FitRequest {
    pub input: PathBuf,
    pub orientation: Orientation,
    pub correlation: bool,
    pub center: bool,
    pub penalty: PenaltyConfig,
    pub lambda: f64,
    pub init: InitStrategy,
    pub solver: SolverOptions,
    pub output: PathBuf,
    pub summary_path: Option<PathBuf>,
    pub deterministic_timing: bool,
}

/// JSON run summary written next to the fitted edge list.
#[derive(Serialize)]
struct FitSummary<'a> {
    input: String,
    p: usize,
    n: usize,
    orientation: String,
    correlation: bool,
    centered: bool,
    penalty: PenaltySummary,
    init: String,
    solver: &'a SolverOptions,
    status: ConvergenceStatus,
    outer_iters: usize,
    inner_iters: &'a [usize],
    total_inner_iters: usize,
    n_edges: usize,
    edge_threshold: f64,
    objective_trace: &'a [Vec<f64>],
    elapsed_ms: u128,
}

#[derive(Serialize)]
struct PenaltySummary {
    kind: String,
    lambda: f64,
    gamma: f64,
}

/// Outcome of [`run_data`] for the command-line report.
pub struct FitArtifacts {
    pub output: PathBuf,
    pub summary_path: PathBuf,
    pub p: usize,
    pub n: usize,
    pub n_edges: usize,
    pub status: ConvergenceStatus,
}

/// Fits one graph to a CSV data matrix and writes the edge list plus a
/// JSON run summary.
pub fn run_data(request: &FitRequest) -> Result<FitArtifacts> {
    request.solver.validate().map_err(laplearn::Error::from)?;
    let penalty = request.penalty.spec(request.lambda)?;

    let mut x = read_data_matrix(&request.input, request.orientation)?;
    let p = x.nrows();
    let n = x.ncols();
    if p < 2 {
        return Err(CliError::InvalidConfig(format!(
            "data has {p} variable(s); at least 2 are required"
        )));
    }
    if request.center {
        for i in 0..p {
            let mean = x.row(i).sum() / n as f64;
            for c in 0..n {
                x[(i, c)] -= mean;
            }
        }
    }
    let s = if request.correlation {
        correlation_matrix(&x)?
    } else {
        sample_covariance(&x)?
    };

    let w0 = initial_point(request.init, Some(&s), p)?;
    let started = Instant::now();
    let report = ngl(&s, &penalty, &request.solver, &w0)?;
    let elapsed_ms = if request.deterministic_timing {
        0
    } else {
        started.elapsed().as_millis()
    };

    write_edge_list_csv(&request.output, &report.w_hat, request.solver.edge_threshold)?;

    let n_edges = count_edges(&report.w_hat, request.solver.edge_threshold)?;
    let summary = FitSummary {
        input: request.input.display().to_string(),
        p,
        n,
        orientation: request.orientation.to_string(),
        correlation: request.correlation,
        centered: request.center,
        penalty: PenaltySummary {
            kind: penalty.kind().to_string(),
            lambda: penalty.lambda(),
            gamma: penalty.gamma(),
        },
        init: request.init.to_string(),
        solver: &request.solver,
        status: report.status,
        outer_iters: report.outer_iters(),
        inner_iters: &report.inner_iters,
        total_inner_iters: report.total_inner_iters(),
        n_edges,
        edge_threshold: request.solver.edge_threshold,
        objective_trace: &report.objective_trace,
        elapsed_ms,
    };
    let summary_path = request
        .summary_path
        .clone()
        .unwrap_or_else(|| request.output.with_extension("summary.json"));
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    std::fs::write(&summary_path, text).map_err(|e| CliError::io(&summary_path, e))?;

    Ok(FitArtifacts {
        output: request.output.clone(),
        summary_path,
        p,
        n,
        n_edges,
        status: report.status,
    })
}
