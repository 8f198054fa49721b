//! Plot-ready summary tables derived from a results CSV.
//!
//! `plot-tables` re-reads the per-realization results file written by the
//! `synthetic` subcommand and emits six small CSVs, one per (metric, x-axis)
//! pair, each row holding the mean and sample standard deviation over the
//! realizations of one `(lambda, n_over_p)` cell. Rows whose fit failed
//! numerically (or whose metrics are not finite) are excluded and reported
//! in the returned tally.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use laplearn::solver::ConvergenceStatus;

use crate::error::{CliError, Result};
use crate::run::{mean_std, RESULTS_HEADER};

/// Per-cell metric samples accumulated from the results file.
struct Cell {
    lambda: f64,
    n_over_p: f64,
    edges: Vec<f64>,
    re: Vec<f64>,
    fs: Vec<f64>,
}

/// What [`emit_plot_tables`] produced.
#[derive(Debug)]
pub struct TableArtifacts {
    pub files: Vec<PathBuf>,
    pub n_cells: usize,
    pub n_rows_used: usize,
    pub n_rows_skipped: usize,
}

/// Aggregates `results_csv` into six plot tables under `out_dir`.
///
/// `{edges,re,fs}_vs_lambda.csv` are sorted by `(n_over_p, lambda)` so each
/// sample-size curve is contiguous; `{edges,re,fs}_vs_n_over_p.csv` are
/// sorted by `(lambda, n_over_p)` for the transposed view.
pub fn emit_plot_tables(results_csv: &Path, out_dir: &Path) -> Result<TableArtifacts> {
    let (cells, n_used, n_skipped) = read_cells(results_csv)?;
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;

    // Nonnegative finite doubles order the same by bits as by value, and
    // both axes are nonnegative, so bit keys give a clean numeric sort.
    let by_lambda: Vec<&Cell> = {
        let mut v: Vec<&Cell> = cells.values().collect();
        v.sort_by_key(|c| (c.n_over_p.to_bits(), c.lambda.to_bits()));
        v
    };
    let by_n_over_p: Vec<&Cell> = {
        let mut v: Vec<&Cell> = cells.values().collect();
        v.sort_by_key(|c| (c.lambda.to_bits(), c.n_over_p.to_bits()));
        v
    };

    let mut files = Vec::with_capacity(6);
    for (metric, pick) in metric_columns() {
        let path = out_dir.join(format!("{metric}_vs_lambda.csv"));
        let mut text = String::from("lambda,n_over_p,count,mean,std\n");
        for cell in &by_lambda {
            let values = pick(cell);
            let (mean, std) = mean_std(values);
            text.push_str(&format!(
                "{},{},{},{},{}\n",
                cell.lambda,
                cell.n_over_p,
                values.len(),
                mean,
                std
            ));
        }
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        files.push(path);
    }
    for (metric, pick) in metric_columns() {
        let path = out_dir.join(format!("{metric}_vs_n_over_p.csv"));
        let mut text = String::from("n_over_p,lambda,count,mean,std\n");
        for cell in &by_n_over_p {
            let values = pick(cell);
            let (mean, std) = mean_std(values);
            text.push_str(&format!(
                "{},{},{},{},{}\n",
                cell.n_over_p,
                cell.lambda,
                values.len(),
                mean,
                std
            ));
        }
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        files.push(path);
    }

    Ok(TableArtifacts {
        files,
        n_cells: cells.len(),
        n_rows_used: n_used,
        n_rows_skipped: n_skipped,
    })
}

type MetricPick = fn(&Cell) -> &[f64];

fn metric_columns() -> [(&'static str, MetricPick); 3] {
    [
        ("edges", |c: &Cell| c.edges.as_slice()),
        ("re", |c: &Cell| c.re.as_slice()),
        ("fs", |c: &Cell| c.fs.as_slice()),
    ]
}

/// Parses the results CSV into per-cell samples, skipping failed rows.
fn read_cells(path: &Path) -> Result<(BTreeMap<(u64, u64), Cell>, usize, usize)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| bad_row(path, 1, format!("cannot open: {e}")))?;
    let header: Vec<String> = reader
        .headers()?
        .iter()
        .map(|s| s.to_string())
        .collect();
    let expected: Vec<&str> = RESULTS_HEADER.split(',').collect();
    if header != expected {
        return Err(bad_row(
            path,
            1,
            format!("header {header:?} does not match {expected:?}"),
        ));
    }

    let mut cells: BTreeMap<(u64, u64), Cell> = BTreeMap::new();
    let mut n_used = 0;
    let mut n_skipped = 0;
    for (i, record) in reader.records().enumerate() {
        let row = i + 2; // physical line, header is line 1
        let record = record?;
        let field = |col: usize| -> Result<&str> {
            record
                .get(col)
                .ok_or_else(|| bad_row(path, row, format!("missing column {}", expected[col])))
        };
        let number = |col: usize| -> Result<f64> {
            let token = field(col)?;
            token.parse::<f64>().map_err(|_| {
                bad_row(
                    path,
                    row,
                    format!("column {} is not a number: {token:?}", expected[col]),
                )
            })
        };
        let lambda = number(1)?;
        let n_over_p = number(2)?;
        let n_edges = number(3)?;
        let re = number(4)?;
        let fs = number(5)?;
        let status: ConvergenceStatus = field(8)?
            .parse()
            .map_err(|e| bad_row(path, row, format!("{e}")))?;

        if status == ConvergenceStatus::NumericalFailure || !re.is_finite() || !fs.is_finite() {
            n_skipped += 1;
            continue;
        }
        n_used += 1;
        let cell = cells
            .entry((lambda.to_bits(), n_over_p.to_bits()))
            .or_insert_with(|| Cell {
                lambda,
                n_over_p,
                edges: Vec::new(),
                re: Vec::new(),
                fs: Vec::new(),
            });
        cell.edges.push(n_edges);
        cell.re.push(re);
        cell.fs.push(fs);
    }
    Ok((cells, n_used, n_skipped))
}

fn bad_row(path: &Path, row: usize, message: String) -> CliError {
    CliError::BadResultsRow {
        path: path.display().to_string(),
        row,
        message,
    }
}
