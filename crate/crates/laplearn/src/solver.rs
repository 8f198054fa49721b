//! Penalized maximum-likelihood solvers over the set of connected-graph
//! Laplacians.
//!
//! The central object is the weighted-l1 subproblem
//!
//! ```text
//!   minimize_{w >= 0}  f(w) = -log det(L(w) + J) + <Lstar(S), w> + <z, w>
//! ```
//!
//! solved by projected gradient descent with backtracking line search
//! ([`solve_subproblem`]). The nonconvex estimator ([`ngl`]) wraps it in a
//! majorize-minimize loop that refreshes `z` from the penalty derivative at
//! the current iterate and warm-starts each subproblem at the previous
//! solution. The plain l1 estimator is the one-shot special case
//! `z = lambda * 1`, which [`ngl`] dispatches to directly since a constant
//! derivative can never change between outer steps.
//!
//! Feasibility (`L(w) + J` positive definite, i.e. the graph stays
//! connected) is enforced by construction: a trial step whose factorization
//! fails is treated exactly like a failed line-search test and the step
//! size shrinks. Every accepted iterate is therefore feasible and the
//! objective trace is nonincreasing within each inner solve.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{self, edge_count, EdgeIndexMap, WeightVector};
use crate::penalty::{PenaltyKind, PenaltySpec};

/// Step sizes below this abort the line search as a numerical failure.
const ETA_MIN: f64 = 1e-20;

/// Tuning knobs for the inner and outer loops.
///
/// All fields have serde defaults, so a JSON config may specify any subset.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Initial step size for each inner solve.
    pub eta0: f64,
    /// Backtracking shrink factor, strictly between 0 and 1.
    pub beta: f64,
    /// Inner stop: relative iterate change below this ends the subproblem.
    pub tol_inner: f64,
    /// Inner iteration cap per subproblem.
    pub max_inner: usize,
    /// Outer stop: relative change between subproblem solutions.
    pub tol_outer: f64,
    /// Outer (majorize-minimize) iteration cap.
    pub max_outer: usize,
    /// Weights at or below this are not reported as edges.
    pub edge_threshold: f64,
    /// Record every accepted iterate in the report (memory-heavy; off by
    /// default, intended for convergence diagnostics).
    pub record_iterates: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            eta0: 1.0,
            beta: 0.5,
            tol_inner: 1e-7,
            max_inner: 5000,
            tol_outer: 1e-6,
            max_outer: 50,
            edge_threshold: 1e-5,
            record_iterates: false,
        }
    }
}

impl SolverOptions {
    /// Rejects non-positive sizes/tolerances and out-of-range `beta`.
    pub fn validate(&self) -> Result<()> {
        for (what, value) in [
            ("eta0", self.eta0),
            ("tol_inner", self.tol_inner),
            ("tol_outer", self.tol_outer),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::NonPositive { what, value });
            }
        }
        if !self.beta.is_finite() || self.beta <= 0.0 || self.beta >= 1.0 {
            return Err(Error::InvalidProbability {
                what: "beta",
                value: self.beta,
            });
        }
        if self.max_inner == 0 {
            return Err(Error::ZeroArgument { what: "max_inner" });
        }
        if self.max_outer == 0 {
            return Err(Error::ZeroArgument { what: "max_outer" });
        }
        if !self.edge_threshold.is_finite() || self.edge_threshold < 0.0 {
            return Err(Error::NonPositive {
                what: "edge_threshold",
                value: self.edge_threshold,
            });
        }
        Ok(())
    }
}

/// How a solve ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConvergenceStatus {
    /// The relevant relative-change tolerance was met.
    #[serde(rename = "converged")]
    Converged,
    /// The iteration cap was hit first.
    #[serde(rename = "max_iter")]
    MaxIterations,
    /// A factorization kept failing even after the step size was shrunk to
    /// its floor; the report carries the last accepted iterate.
    #[serde(rename = "numerical_failure")]
    NumericalFailure,
}

impl std::fmt::Display for ConvergenceStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ConvergenceStatus::Converged => "converged",
            ConvergenceStatus::MaxIterations => "max_iter",
            ConvergenceStatus::NumericalFailure => "numerical_failure",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for ConvergenceStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "converged" => Ok(ConvergenceStatus::Converged),
            "max_iter" => Ok(ConvergenceStatus::MaxIterations),
            "numerical_failure" => Ok(ConvergenceStatus::NumericalFailure),
            other => Err(Error::UnknownStatus(other.to_string())),
        }
    }
}

/// Everything a single weighted-l1 subproblem needs: the covariance-like
/// matrix `S`, the fixed penalty weights `z`, and a feasible start.
#[derive(Clone, Debug)]
pub struct SubproblemSpec {
    s: DMatrix<f64>,
    z: DVector<f64>,
    w0: WeightVector,
}

impl SubproblemSpec {
    /// Validates shapes (`S` is `p x p`, `z` has length `p(p-1)/2`),
    /// finiteness, `z >= 0`, and feasibility of the start.
    pub fn new(s: DMatrix<f64>, z: DVector<f64>, w0: WeightVector) -> Result<Self> {
        let p = w0.p();
        validate_covariance_shape(&s, p)?;
        if z.len() != edge_count(p) {
            return Err(Error::DimensionMismatch {
                what: "penalty weight vector z",
                got: z.len(),
                expected: edge_count(p),
            });
        }
        for (k, &v) in z.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    what: "penalty weight",
                    index: k,
                    value: v,
                });
            }
            if v < 0.0 {
                return Err(Error::NegativeWeight { index: k, value: v });
            }
        }
        if !graph::is_feasible(&w0) {
            return Err(Error::InfeasibleInitialPoint);
        }
        Ok(Self { s, z, w0 })
    }

    /// The covariance-like matrix.
    pub fn s(&self) -> &DMatrix<f64> {
        &self.s
    }

    /// The fixed penalty weight vector.
    pub fn z(&self) -> &DVector<f64> {
        &self.z
    }

    /// The feasible initial point.
    pub fn w0(&self) -> &WeightVector {
        &self.w0
    }
}

fn validate_covariance_shape(s: &DMatrix<f64>, p: usize) -> Result<()> {
    if s.nrows() != s.ncols() {
        return Err(Error::NotSquare {
            rows: s.nrows(),
            cols: s.ncols(),
        });
    }
    if s.nrows() != p {
        return Err(Error::DimensionMismatch {
            what: "covariance matrix side",
            got: s.nrows(),
            expected: p,
        });
    }
    for (idx, &v) in s.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite {
                what: "covariance entry",
                index: idx,
                value: v,
            });
        }
    }
    Ok(())
}

/// The full record of a solve: final weights, per-outer-step traces of the
/// objective and accepted step sizes, and how it ended.
#[derive(Clone, Debug)]
pub struct SolveReport {
    /// Final (best) weights; always feasible unless the very first
    /// factorization failed.
    pub w_hat: WeightVector,
    /// `objective_trace[k]` holds the objective values of outer step `k`,
    /// starting with the warm-start value; nonincreasing within each `k`.
    pub objective_trace: Vec<Vec<f64>>,
    /// `step_trace[k][t]` is the step size accepted at inner iteration `t`
    /// of outer step `k` (one entry per accepted step).
    pub step_trace: Vec<Vec<f64>>,
    /// Accepted inner iterations per outer step.
    pub inner_iters: Vec<usize>,
    /// Accepted iterates per outer step, starting with the warm start.
    /// Empty unless [`SolverOptions::record_iterates`] was set.
    pub iterate_trace: Vec<Vec<DVector<f64>>>,
    /// How the overall solve ended.
    pub status: ConvergenceStatus,
}

impl SolveReport {
    /// Number of outer (majorize-minimize) steps taken.
    pub fn outer_iters(&self) -> usize {
        self.inner_iters.len()
    }

    /// Total inner iterations across all outer steps.
    pub fn total_inner_iters(&self) -> usize {
        self.inner_iters.iter().sum()
    }

    /// Final objective value, if any iteration ran.
    pub fn final_objective(&self) -> Option<f64> {
        self.objective_trace.last().and_then(|t| t.last()).copied()
    }
}

/// The subproblem objective
/// `-log det(L(w) + J) + <Lstar(S), w> + <z, w>`.
///
/// Infeasible `w` (graph disconnected, factorization fails) yields the
/// `+inf` sentinel rather than an error: the objective's domain is defined
/// by feasibility and the solver treats the outside as infinitely bad.
pub fn objective(w: &WeightVector, s: &DMatrix<f64>, z: &DVector<f64>) -> Result<f64> {
    let engine = Engine::new(w.p(), s, z)?;
    Ok(match engine.eval(w.as_vector()) {
        Some((f, _)) => f,
        None => f64::INFINITY,
    })
}

/// The subproblem gradient
/// `Lstar(S) + z - Lstar((L(w) + J)^{-1})`, evaluated by factorizing
/// `L(w) + J` once and applying the adjoint to its inverse.
///
/// Fails with the offending iterate if `w` is infeasible.
pub fn gradient(w: &WeightVector, s: &DMatrix<f64>, z: &DVector<f64>) -> Result<DVector<f64>> {
    let engine = Engine::new(w.p(), s, z)?;
    match engine.eval(w.as_vector()) {
        Some((_, chol)) => Ok(engine.gradient(&chol)),
        None => Err(Error::InfeasibleIterate {
            w: w.as_vector().as_slice().to_vec(),
        }),
    }
}

/// Precomputed pieces shared by objective and gradient evaluations of one
/// subproblem: the linear coefficient `c = Lstar(S) + z`.
struct Engine {
    p: usize,
    c: DVector<f64>,
}

impl Engine {
    fn new(p: usize, s: &DMatrix<f64>, z: &DVector<f64>) -> Result<Self> {
        validate_covariance_shape(s, p)?;
        if z.len() != edge_count(p) {
            return Err(Error::DimensionMismatch {
                what: "penalty weight vector z",
                got: z.len(),
                expected: edge_count(p),
            });
        }
        let c = graph::lstar_of(s) + z;
        Ok(Self { p, c })
    }

    /// Objective value and the Cholesky factor of `L(w) + J`, or `None`
    /// when `w` is outside the feasible domain.
    fn eval(&self, w: &DVector<f64>) -> Option<(f64, Cholesky<f64, Dyn>)> {
        let chol = graph::cholesky_of_plus_j(self.p, w)?;
        let mut logdet = 0.0;
        let l = chol.l_dirty();
        for i in 0..self.p {
            logdet += l[(i, i)].ln();
        }
        let f = -2.0 * logdet + self.c.dot(w);
        f.is_finite().then_some((f, chol))
    }

    /// Gradient at the iterate whose factor is `chol`.
    fn gradient(&self, chol: &Cholesky<f64, Dyn>) -> DVector<f64> {
        &self.c - graph::lstar_of(&chol.inverse())
    }
}

/// Outcome of one projected-gradient inner solve.
struct InnerOutcome {
    w: DVector<f64>,
    objective_trace: Vec<f64>,
    step_trace: Vec<f64>,
    iterates: Vec<DVector<f64>>,
    status: ConvergenceStatus,
}

/// Projected gradient descent with backtracking on one subproblem.
///
/// Each iteration proposes `w_t = max(0, w_{t-1} - eta * g)` and shrinks
/// `eta` by `beta` until the quadratic-upper-bound test
/// `f(w_t) <= f(w_{t-1}) + <g, dw> + |dw|^2 / (2 eta)` passes; a trial
/// point whose factorization fails counts as a failed test. The accepted
/// step size carries over to the next iteration.
fn run_inner(engine: &Engine, w0: &DVector<f64>, opts: &SolverOptions) -> InnerOutcome {
    let mut w = w0.clone();
    let mut iterates = Vec::new();
    if opts.record_iterates {
        iterates.push(w.clone());
    }

    let Some((mut f_prev, mut chol)) = engine.eval(&w) else {
        return InnerOutcome {
            w,
            objective_trace: Vec::new(),
            step_trace: Vec::new(),
            iterates,
            status: ConvergenceStatus::NumericalFailure,
        };
    };
    let mut objective_trace = vec![f_prev];
    let mut step_trace = Vec::new();
    let mut eta = opts.eta0;
    let mut status = ConvergenceStatus::MaxIterations;

    for _ in 0..opts.max_inner {
        let g = engine.gradient(&chol);
        let accepted = loop {
            let w_trial = w.zip_map(&g, |wi, gi| (wi - eta * gi).max(0.0));
            let delta = &w_trial - &w;
            let dn2 = delta.norm_squared();
            if let Some((f_trial, chol_trial)) = engine.eval(&w_trial) {
                let rhs = f_prev + g.dot(&delta) + dn2 / (2.0 * eta);
                // The second clause is implied mathematically; it guards
                // the nonincreasing-trace invariant against rounding in
                // the first.
                if f_trial <= rhs && f_trial <= f_prev {
                    break Some((w_trial, dn2, f_trial, chol_trial));
                }
            }
            eta *= opts.beta;
            if eta < ETA_MIN {
                break None;
            }
        };
        let Some((w_trial, dn2, f_trial, chol_trial)) = accepted else {
            status = ConvergenceStatus::NumericalFailure;
            break;
        };

        let rel = dn2.sqrt() / w.norm().max(1.0);
        w = w_trial;
        f_prev = f_trial;
        chol = chol_trial;
        objective_trace.push(f_prev);
        step_trace.push(eta);
        if opts.record_iterates {
            iterates.push(w.clone());
        }
        if rel < opts.tol_inner {
            status = ConvergenceStatus::Converged;
            break;
        }
    }

    InnerOutcome {
        w,
        objective_trace,
        step_trace,
        iterates,
        status,
    }
}

/// Solves one weighted-l1 subproblem by projected gradient descent.
///
/// Factorization trouble is reported through
/// [`SolveReport::status`], never as an `Err`: the report then carries the
/// last accepted iterate.
pub fn solve_subproblem(spec: &SubproblemSpec, opts: &SolverOptions) -> Result<SolveReport> {
    opts.validate()?;
    let p = spec.w0.p();
    let engine = Engine::new(p, &spec.s, &spec.z)?;
    let outcome = run_inner(&engine, spec.w0.as_vector(), opts);
    let iters = outcome.step_trace.len();
    Ok(SolveReport {
        w_hat: WeightVector::new(p, outcome.w)?,
        objective_trace: vec![outcome.objective_trace],
        step_trace: vec![outcome.step_trace],
        inner_iters: vec![iters],
        iterate_trace: if opts.record_iterates {
            vec![outcome.iterates]
        } else {
            Vec::new()
        },
        status: outcome.status,
    })
}

/// The nonconvex estimator: majorize-minimize over subproblems.
///
/// Each outer step refreshes `z` to the penalty derivative at the current
/// weights, solves the resulting subproblem warm-started there, and stops
/// when the relative change between consecutive solutions drops below
/// `tol_outer` (or `max_outer` is hit). An l1 penalty short-circuits to a
/// single subproblem with `z = lambda * 1`, since its derivative never
/// changes.
pub fn ngl(
    s: &DMatrix<f64>,
    penalty: &PenaltySpec,
    opts: &SolverOptions,
    w0: &WeightVector,
) -> Result<SolveReport> {
    opts.validate()?;
    let p = w0.p();
    if !graph::is_feasible(w0) {
        return Err(Error::InfeasibleInitialPoint);
    }

    if penalty.kind() == PenaltyKind::L1 {
        let z = DVector::from_element(edge_count(p), penalty.lambda());
        let spec = SubproblemSpec::new(s.clone(), z, w0.clone())?;
        return solve_subproblem(&spec, opts);
    }

    let mut engine = Engine::new(p, s, &DVector::zeros(edge_count(p)))?;
    let lstar_s = engine.c.clone();
    let mut w = w0.as_vector().clone();
    let mut objective_trace = Vec::new();
    let mut step_trace = Vec::new();
    let mut inner_iters = Vec::new();
    let mut iterate_trace = Vec::new();
    let mut status = ConvergenceStatus::MaxIterations;

    for _ in 0..opts.max_outer {
        let z = penalty.mm_weights(&WeightVector::new(p, w.clone())?);
        engine.c = &lstar_s + &z;
        let outcome = run_inner(&engine, &w, opts);
        objective_trace.push(outcome.objective_trace);
        inner_iters.push(outcome.step_trace.len());
        step_trace.push(outcome.step_trace);
        if opts.record_iterates {
            iterate_trace.push(outcome.iterates);
        }
        if outcome.status == ConvergenceStatus::NumericalFailure {
            w = outcome.w;
            status = ConvergenceStatus::NumericalFailure;
            break;
        }
        let rel = (&outcome.w - &w).norm() / w.norm().max(1.0);
        w = outcome.w;
        if rel < opts.tol_outer {
            status = ConvergenceStatus::Converged;
            break;
        }
    }

    Ok(SolveReport {
        w_hat: WeightVector::new(p, w)?,
        objective_trace,
        step_trace,
        inner_iters,
        iterate_trace,
        status,
    })
}

/// Initial-point strategies for the solvers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitStrategy {
    /// Unit weights on the star rooted at node 1 (the default).
    Star,
    /// Unit weights on a maximum-weight spanning tree of `|S_ij|`.
    Mst,
    /// Unit weights on every edge.
    Dense,
}

impl std::fmt::Display for InitStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            InitStrategy::Star => "star",
            InitStrategy::Mst => "mst",
            InitStrategy::Dense => "dense",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for InitStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "star" => Ok(InitStrategy::Star),
            "mst" => Ok(InitStrategy::Mst),
            "dense" => Ok(InitStrategy::Dense),
            other => Err(Error::UnknownInitStrategy(other.to_string())),
        }
    }
}

/// The default feasible start: unit weights on the star rooted at node 1.
///
/// It is connected (hence feasible) and has only `p - 1` positive entries,
/// which keeps the initial support as sparse as any connected graph allows.
pub fn default_initial_point(p: usize) -> Result<WeightVector> {
    if p < 2 {
        return Err(Error::InvalidNodeCount(p));
    }
    let map = EdgeIndexMap::new(p)?;
    let mut w = DVector::zeros(edge_count(p));
    for i in 2..=p {
        w[map.edge_index(i, 1)? - 1] = 1.0;
    }
    WeightVector::new(p, w)
}

/// Builds an initial point by strategy. `Mst` requires `s` (the matrix
/// whose `|S_ij|` define edge similarities); the others ignore it.
pub fn initial_point(
    strategy: InitStrategy,
    s: Option<&DMatrix<f64>>,
    p: usize,
) -> Result<WeightVector> {
    match strategy {
        InitStrategy::Star => default_initial_point(p),
        InitStrategy::Dense => {
            if p < 2 {
                return Err(Error::InvalidNodeCount(p));
            }
            WeightVector::new(p, DVector::from_element(edge_count(p), 1.0))
        }
        InitStrategy::Mst => {
            let s = s.ok_or(Error::MissingCovariance)?;
            validate_covariance_shape(s, p)?;
            if p < 2 {
                return Err(Error::InvalidNodeCount(p));
            }
            let map = EdgeIndexMap::new(p)?;
            let mut edges: Vec<(usize, usize, usize, f64)> = map
                .pairs()
                .enumerate()
                .map(|(k, (i, j))| (k, i, j, s[(i - 1, j - 1)].abs()))
                .collect();
            // Greatest similarity first; ties broken by edge index so the
            // result is deterministic.
            edges.sort_by(|a, b| b.3.partial_cmp(&a.3).unwrap().then(a.0.cmp(&b.0)));

            let mut parent: Vec<usize> = (0..=p).collect();
            fn find(parent: &mut [usize], x: usize) -> usize {
                let mut root = x;
                while parent[root] != root {
                    root = parent[root];
                }
                let mut cur = x;
                while parent[cur] != root {
                    let next = parent[cur];
                    parent[cur] = root;
                    cur = next;
                }
                root
            }
            let mut w = DVector::zeros(edge_count(p));
            let mut picked = 0;
            for (k, i, j, _) in edges {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                    w[k] = 1.0;
                    picked += 1;
                    if picked == p - 1 {
                        break;
                    }
                }
            }
            WeightVector::new(p, w)
        }
    }
}
