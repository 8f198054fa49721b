//! CSV ingestion and emission for data matrices and edge lists.
//!
//! Real-world data arrives as a numeric CSV with an optional header row and
//! either one row per variable or one row per observation; the
//! [`Orientation`] flag says which. Fitted graphs leave as `i,j,weight`
//! edge lists with 1-based node ids. All diagnostics carry 1-based physical
//! row/column coordinates so they can be chased in an editor.
//!
//! Header detection is a fixed rule: the first row is treated as a header
//! exactly when at least one of its fields does not parse as a number. A
//! fully numeric header row is indistinguishable from data and will be read
//! as data.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{edge_count, EdgeIndexMap, WeightVector};

/// How to interpret the rows of an input data matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    /// Each CSV row is one variable; columns are observations.
    #[serde(rename = "rows-are-variables")]
    RowsAreVariables,
    /// Each CSV row is one observation; columns are variables.
    #[serde(rename = "rows-are-observations")]
    RowsAreObservations,
}

impl Orientation {
    /// Reorients a freshly read matrix into the `p x n`
    /// variables-by-observations layout the estimators expect.
    pub fn apply(self, matrix: DMatrix<f64>) -> DMatrix<f64> {
        match self {
            Orientation::RowsAreVariables => matrix,
            Orientation::RowsAreObservations => matrix.transpose(),
        }
    }
}

impl std::fmt::Display for Orientation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Orientation::RowsAreVariables => "rows-are-variables",
            Orientation::RowsAreObservations => "rows-are-observations",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rows-are-variables" => Ok(Orientation::RowsAreVariables),
            "rows-are-observations" => Ok(Orientation::RowsAreObservations),
            other => Err(Error::UnknownOrientation(other.to_string())),
        }
    }
}

/// Reads a numeric CSV into a matrix laid out exactly as in the file
/// (row `r`, column `c` of the result is physical row `r`, field `c`).
///
/// The first row is skipped as a header iff any of its fields fails to
/// parse as a number. Every remaining field must be a finite number and
/// every row must have the same number of fields; violations are reported
/// with 1-based physical coordinates.
pub fn read_matrix_csv(path: &Path) -> Result<DMatrix<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut expected_cols = None;
    let mut physical_row = 0;
    for record in reader.records() {
        let record = record?;
        physical_row += 1;

        if physical_row == 1 {
            let parsed: Option<Vec<f64>> =
                record.iter().map(|f| f.parse::<f64>().ok()).collect();
            match parsed {
                Some(values) => {
                    expected_cols = Some(values.len());
                    check_finite(&values, physical_row)?;
                    rows.push(values);
                }
                None => {
                    // Header row: remember its width only as a hint; the
                    // first data row fixes the real expectation.
                    continue;
                }
            }
            continue;
        }

        let expected = *expected_cols.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::RaggedRow {
                row: physical_row,
                got: record.len(),
                expected,
            });
        }
        let mut values = Vec::with_capacity(record.len());
        for (c, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::NonNumericField {
                row: physical_row,
                col: c + 1,
                token: field.to_string(),
            })?;
            values.push(v);
        }
        check_finite(&values, physical_row)?;
        rows.push(values);
    }

    if rows.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    let ncols = rows[0].len();
    if ncols == 0 {
        return Err(Error::EmptyMatrix);
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |r, c| rows[r][c]))
}

fn check_finite(values: &[f64], physical_row: usize) -> Result<()> {
    for (c, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFiniteField {
                row: physical_row,
                col: c + 1,
            });
        }
    }
    Ok(())
}

/// Reads a CSV and reorients it into `p x n` variables-by-observations.
pub fn read_data_matrix(path: &Path, orientation: Orientation) -> Result<DMatrix<f64>> {
    Ok(orientation.apply(read_matrix_csv(path)?))
}

/// Reads an `i,j,weight` edge list (optional header, 1-based node ids,
/// `i != j`, each undirected edge at most once) into a weight vector on
/// `p` nodes.
pub fn read_edge_list_csv(path: &Path, p: usize) -> Result<WeightVector> {
    if p < 2 {
        return Err(Error::InvalidNodeCount(p));
    }
    let map = EdgeIndexMap::new(p)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;

    let mut w = vec![0.0; edge_count(p)];
    let mut seen = vec![false; edge_count(p)];
    let mut physical_row = 0;
    for record in reader.records() {
        let record = record?;
        physical_row += 1;

        if physical_row == 1 && record.iter().any(|f| f.parse::<f64>().is_err()) {
            continue; // header
        }
        if record.len() != 3 {
            return Err(Error::RaggedRow {
                row: physical_row,
                got: record.len(),
                expected: 3,
            });
        }
        let parse_node = |c: usize| -> Result<usize> {
            record[c].parse::<usize>().map_err(|_| Error::NonNumericField {
                row: physical_row,
                col: c + 1,
                token: record[c].to_string(),
            })
        };
        let a = parse_node(0)?;
        let b = parse_node(1)?;
        let weight: f64 = record[2].parse().map_err(|_| Error::NonNumericField {
            row: physical_row,
            col: 3,
            token: record[2].to_string(),
        })?;
        if !weight.is_finite() {
            return Err(Error::NonFiniteField {
                row: physical_row,
                col: 3,
            });
        }
        if weight < 0.0 {
            return Err(Error::NegativeWeight {
                index: physical_row,
                value: weight,
            });
        }
        let (i, j) = (a.max(b), a.min(b));
        let k = map.edge_index(i, j)?; // covers i == j and out-of-range
        if seen[k - 1] {
            return Err(Error::DuplicateEdge { i, j });
        }
        seen[k - 1] = true;
        w[k - 1] = weight;
    }

    WeightVector::from_vec(p, w)
}

/// Writes the edges of `w` above `edge_threshold` as an `i,j,weight` CSV
/// (header included, edges in index order, weights in shortest
/// round-trip decimal form).
pub fn write_edge_list_csv(path: &Path, w: &WeightVector, edge_threshold: f64) -> Result<()> {
    if !edge_threshold.is_finite() || edge_threshold < 0.0 {
        return Err(Error::NonPositive {
            what: "edge_threshold",
            value: edge_threshold,
        });
    }
    let map = EdgeIndexMap::new(w.p())?;
    let mut out = String::from("i,j,weight\n");
    for (k, (i, j)) in map.pairs().enumerate() {
        if w[k] > edge_threshold {
            out.push_str(&format!("{i},{j},{}\n", w[k]));
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}
