//! Learning sparse connected-graph Laplacians from data.
//!
//! This crate estimates the precision matrix of an improper Gaussian
//! Markov random field under the constraint that it is the Laplacian of a
//! connected weighted graph. The parametrization works on the
//! `p(p-1)/2`-dimensional vector of nonnegative edge weights `w`; the
//! matrix side is reached through the linear operator `L` (see [`graph`])
//! that maps weights to Laplacians, and through its adjoint.
//!
//! Two estimators are provided in [`solver`]:
//!
//! * the **l1-penalized maximum likelihood** estimator, a single weighted
//!   subproblem with constant penalty weights — useful mainly to
//!   demonstrate that an l1 penalty on Laplacian weights *densifies*
//!   rather than sparsifies the fitted graph as the penalty grows; and
//! * the **nonconvex estimator** (`ngl`), a majorize-minimize loop over
//!   MCP or SCAD penalties (see [`penalty`]) whose subproblems are solved
//!   by projected gradient descent with backtracking.
//!
//! [`model`] generates synthetic ground-truth graphs and exact samples
//! from the induced degenerate Gaussian; [`metrics`] scores fitted graphs
//! against the truth; [`io`] reads data matrices and reads/writes edge
//! lists as CSV.
//!
//! # Example
//!
//! ```
//! use laplearn::model::{generate_ba_tree, sample_lgmrf};
//! use laplearn::penalty::PenaltySpec;
//! use laplearn::solver::{default_initial_point, ngl, SolverOptions};
//! use laplearn::metrics::evaluate;
//!
//! let truth = generate_ba_tree(20, (2.0, 5.0), 7).unwrap();
//! let data = sample_lgmrf(&truth, 2000, 8).unwrap();
//! let w0 = default_initial_point(20).unwrap();
//! let penalty = PenaltySpec::mcp(0.25, 1.01).unwrap();
//! let report = ngl(data.covariance(), &penalty, &SolverOptions::default(), &w0).unwrap();
//! let scores = evaluate(&report.w_hat, truth.weights(), 1e-5).unwrap();
//! assert!(scores.f_score > 0.9);
//! ```

pub mod error;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod model;
pub mod penalty;
pub mod solver;

pub use error::{Error, Result};
// Re-exported so downstream binaries can build and consume matrices
// without naming the linear-algebra backend themselves.
pub use nalgebra::{DMatrix, DVector};
