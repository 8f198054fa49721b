//! Evaluation of fitted graphs against ground truth.
//!
//! Two numbers summarize a fit: the relative error between the estimated
//! and true Laplacians in Frobenius norm, and the F-score of the estimated
//! edge support. Support is an undirected-edge notion: both counts live on
//! the `p(p-1)/2` edge slots, so a tree on 50 nodes has 49 edges, not 98
//! ordered pairs.

use crate::error::{Error, Result};
use crate::graph::{apply_l, WeightVector};

/// Support and error metrics of one fitted graph.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalResult {
    /// `|L(w_hat) - L(w_star)|_F / |L(w_star)|_F`.
    pub relative_error: f64,
    /// `2 tp / (2 tp + fp + fn)`; defined as 1 when all three counts are 0.
    pub f_score: f64,
    /// Estimated edges (`w_hat` entries above the threshold).
    pub n_edges_hat: usize,
    /// True edges (`w_star` entries strictly positive).
    pub n_edges_true: usize,
    /// Edges present in both supports.
    pub true_positives: usize,
    /// Edges estimated but not true.
    pub false_positives: usize,
    /// Edges true but not estimated.
    pub false_negatives: usize,
}

/// Number of entries strictly above `edge_threshold`.
pub fn count_edges(w: &WeightVector, edge_threshold: f64) -> Result<usize> {
    validate_threshold(edge_threshold)?;
    Ok(w.support(edge_threshold).len())
}

/// Compares an estimate against ground truth.
///
/// The estimated support is thresholded (`w > edge_threshold`) because
/// solvers leave numerical dust on pruned edges; the true support is taken
/// exactly (`w > 0`) because generators produce exact zeros. A ground
/// truth with no edges at all has no scale to compare against and is
/// rejected.
pub fn evaluate(
    w_hat: &WeightVector,
    w_star: &WeightVector,
    edge_threshold: f64,
) -> Result<EvalResult> {
    validate_threshold(edge_threshold)?;
    if w_hat.p() != w_star.p() {
        return Err(Error::DimensionMismatch {
            what: "estimated weight vector length",
            got: w_hat.len(),
            expected: w_star.len(),
        });
    }

    let theta_star = apply_l(w_star).into_matrix();
    let norm_star = theta_star.norm();
    if norm_star == 0.0 {
        return Err(Error::ZeroTrueGraph);
    }
    let theta_hat = apply_l(w_hat).into_matrix();
    let relative_error = (theta_hat - theta_star).norm() / norm_star;

    let mut tp = 0;
    let mut fp = 0;
    let mut fn_ = 0;
    for k in 0..w_star.len() {
        let in_hat = w_hat[k] > edge_threshold;
        let in_star = w_star[k] > 0.0;
        match (in_hat, in_star) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }

    Ok(EvalResult {
        relative_error,
        f_score: f_score_from_counts(tp, fp, fn_),
        n_edges_hat: tp + fp,
        n_edges_true: tp + fn_,
        true_positives: tp,
        false_positives: fp,
        false_negatives: fn_,
    })
}

fn f_score_from_counts(tp: usize, fp: usize, fn_: usize) -> f64 {
    let denom = 2 * tp + fp + fn_;
    if denom == 0 {
        // Both supports empty: perfect agreement.
        1.0
    } else {
        2.0 * tp as f64 / denom as f64
    }
}

fn validate_threshold(edge_threshold: f64) -> Result<()> {
    if !edge_threshold.is_finite() || edge_threshold < 0.0 {
        return Err(Error::NonPositive {
            what: "edge_threshold",
            value: edge_threshold,
        });
    }
    Ok(())
}
