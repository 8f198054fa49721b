//! Edge index maps and the linear-operator calculus connecting edge-weight
//! vectors to graph Laplacians.
//!
//! A weighted undirected graph on `p` nodes (no self-loops) has `p(p-1)/2`
//! candidate edges. Their weights are collected in a vector `w` ordered
//! column-by-column over the strict lower triangle of the adjacency matrix.
//! The operator `L` maps `w` to the combinatorial graph Laplacian `Lw`, the
//! adjoint `L*` maps symmetric matrices back to edge space, and `M = L*L` is
//! the Gram operator of `L`.
//!
//! Feasibility of a weight vector means `w >= 0` and `Lw + J` symmetric
//! positive definite, where `J = (1/p) * 11^T`. For nonnegative weights this
//! holds exactly when the weighted graph is connected, which makes positive
//! definiteness of `Lw + J` the computational stand-in for the connectivity
//! constraint.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

/// Bijection between edge indices `k` and node pairs `(i, j)` with `i > j`.
///
/// Indices follow the 1-based convention `k = i - j + (j-1)(2p-j)/2`, so the
/// edges of column `j = 1` come first, then column `j = 2`, and so on. All
/// public methods speak this 1-based language; vector storage is 0-based, so
/// weight `w[k-1]` belongs to the pair returned by [`index_to_pair`].
///
/// [`index_to_pair`]: EdgeIndexMap::index_to_pair
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeIndexMap {
    p: usize,
}

impl EdgeIndexMap {
    /// Creates the index map for a `p`-node graph.
    pub fn new(p: usize) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidNodeCount(p));
        }
        Ok(Self { p })
    }

    /// Node count.
    pub fn p(&self) -> usize {
        self.p
    }

    /// Number of candidate edges, `p(p-1)/2`.
    pub fn edge_count(&self) -> usize {
        edge_count(self.p)
    }

    /// Maps a node pair `(i, j)` with `1 <= j < i <= p` to its 1-based edge
    /// index `k = i - j + (j-1)(2p-j)/2`.
    pub fn edge_index(&self, i: usize, j: usize) -> Result<usize> {
        if j < 1 || i <= j || i > self.p {
            return Err(Error::EdgeOutOfRange { i, j, p: self.p });
        }
        Ok(i - j + (j - 1) * (2 * self.p - j) / 2)
    }

    /// Inverse of [`edge_index`](EdgeIndexMap::edge_index): recovers the node
    /// pair `(i, j)` of a 1-based edge index.
    pub fn index_to_pair(&self, k: usize) -> Result<(usize, usize)> {
        let max = self.edge_count();
        if k < 1 || k > max {
            return Err(Error::EdgeIndexOutOfRange { k, p: self.p, max });
        }
        // Column j covers indices start_j + 1 ..= start_j + (p - j) with
        // start_j = (j-1)(2p-j)/2; scan for the column containing k.
        let mut j = 1;
        loop {
            let start = (j - 1) * (2 * self.p - j) / 2;
            if k <= start + (self.p - j) {
                return Ok((k - start + j, j));
            }
            j += 1;
        }
    }

    /// Iterates over all node pairs `(i, j)` in edge-index order, i.e. the
    /// pair of index `k` is the `k`-th item (1-based).
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let p = self.p;
        (1..p).flat_map(move |j| (j + 1..=p).map(move |i| (i, j)))
    }
}

/// Number of candidate edges of a `p`-node graph.
pub fn edge_count(p: usize) -> usize {
    p * (p - 1) / 2
}

/// Nonnegative edge weights of a `p`-node graph, half-vectorized over the
/// strict lower triangle in [`EdgeIndexMap`] order.
///
/// Construction rejects negative and non-finite entries, so every value of
/// this type satisfies the `w >= 0` half of the feasibility condition; the
/// positive-definiteness half is checked by [`check_feasibility`].
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector {
    p: usize,
    w: DVector<f64>,
}

impl WeightVector {
    /// Wraps a weight vector after validating its length and entries.
    pub fn new(p: usize, w: DVector<f64>) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidNodeCount(p));
        }
        let expected = edge_count(p);
        if w.len() != expected {
            return Err(Error::LengthMismatch {
                got: w.len(),
                expected,
                p,
            });
        }
        for (index, &value) in w.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite {
                    what: "weight vector",
                    index,
                    value,
                });
            }
            if value < 0.0 {
                return Err(Error::NegativeWeight { index, value });
            }
        }
        Ok(Self { p, w })
    }

    /// Convenience constructor from a plain `Vec`.
    pub fn from_vec(p: usize, w: Vec<f64>) -> Result<Self> {
        Self::new(p, DVector::from_vec(w))
    }

    /// The all-zero weight vector (never feasible, but a valid value).
    pub fn zeros(p: usize) -> Result<Self> {
        Self::new(p, DVector::zeros(edge_count(p)))
    }

    /// Node count.
    pub fn p(&self) -> usize {
        self.p
    }

    /// Edge-space dimension `p(p-1)/2`.
    pub fn len(&self) -> usize {
        self.w.len()
    }

    /// True only for the degenerate case, which construction forbids.
    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// Borrow the underlying vector (0-based storage).
    pub fn as_vector(&self) -> &DVector<f64> {
        &self.w
    }

    /// Consume into the underlying vector.
    pub fn into_vector(self) -> DVector<f64> {
        self.w
    }

    /// 0-based positions of entries strictly above `threshold`.
    pub fn support(&self, threshold: f64) -> Vec<usize> {
        self.w
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > threshold)
            .map(|(k, _)| k)
            .collect()
    }
}

impl std::ops::Index<usize> for WeightVector {
    type Output = f64;

    /// 0-based storage access: `w[k]` is the weight of 1-based edge `k + 1`.
    fn index(&self, k: usize) -> &f64 {
        &self.w[k]
    }
}

/// Which matrix a [`LaplacianView`] holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LaplacianKind {
    /// The Laplacian `Lw` itself (rows sum to 0).
    Laplacian,
    /// The rank-one-corrected `Lw + J` (rows sum to 1).
    LaplacianPlusJ,
}

/// Dense symmetric `p x p` matrix produced by the operator `L`, optionally
/// shifted by `J = (1/p) * 11^T`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaplacianView {
    kind: LaplacianKind,
    matrix: DMatrix<f64>,
}

impl LaplacianView {
    /// Which matrix this view holds.
    pub fn kind(&self) -> LaplacianKind {
        self.kind
    }

    /// Node count.
    pub fn p(&self) -> usize {
        self.matrix.nrows()
    }

    /// Borrow the dense matrix.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Consume into the dense matrix.
    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    /// Returns the `Lw + J` companion of a plain-Laplacian view.
    pub fn plus_j(&self) -> LaplacianView {
        match self.kind {
            LaplacianKind::LaplacianPlusJ => self.clone(),
            LaplacianKind::Laplacian => {
                let mut matrix = self.matrix.clone();
                add_j(&mut matrix);
                LaplacianView {
                    kind: LaplacianKind::LaplacianPlusJ,
                    matrix,
                }
            }
        }
    }
}

/// Builds the dense Laplacian `Lw` of a weight vector: `[Lw]_{ij} = -w_k`
/// for the pair `(i, j)` of edge `k`, with diagonal entries completing each
/// row sum to zero.
pub fn apply_l(w: &WeightVector) -> LaplacianView {
    LaplacianView {
        kind: LaplacianKind::Laplacian,
        matrix: laplacian_of(w.p(), w.as_vector()),
    }
}

/// Builds `Lw + J` directly.
pub fn apply_l_plus_j(w: &WeightVector) -> LaplacianView {
    let mut matrix = laplacian_of(w.p(), w.as_vector());
    add_j(&mut matrix);
    LaplacianView {
        kind: LaplacianKind::LaplacianPlusJ,
        matrix,
    }
}

/// Applies the adjoint operator: `[L*Y]_k = Y_ii - Y_ij - Y_ji + Y_jj` for
/// the node pair `(i, j)` of edge `k`.
pub fn apply_lstar(y: &DMatrix<f64>) -> Result<DVector<f64>> {
    if y.nrows() != y.ncols() {
        return Err(Error::NotSquare {
            rows: y.nrows(),
            cols: y.ncols(),
        });
    }
    if y.nrows() < 2 {
        return Err(Error::InvalidNodeCount(y.nrows()));
    }
    Ok(lstar_of(y))
}

/// Dense Laplacian construction on raw storage (0-based edge order).
pub(crate) fn laplacian_of(p: usize, w: &DVector<f64>) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(p, p);
    let mut k = 0;
    for j in 0..p - 1 {
        for i in j + 1..p {
            let x = w[k];
            a[(i, j)] = -x;
            a[(j, i)] = -x;
            a[(i, i)] += x;
            a[(j, j)] += x;
            k += 1;
        }
    }
    a
}

/// Adds `J = (1/p) * 11^T` in place.
pub(crate) fn add_j(a: &mut DMatrix<f64>) {
    let shift = 1.0 / a.nrows() as f64;
    for v in a.iter_mut() {
        *v += shift;
    }
}

/// Adjoint application on raw storage; caller guarantees `y` is square.
pub(crate) fn lstar_of(y: &DMatrix<f64>) -> DVector<f64> {
    let p = y.nrows();
    let mut out = DVector::zeros(edge_count(p));
    let mut k = 0;
    for j in 0..p - 1 {
        for i in j + 1..p {
            out[k] = y[(i, i)] - y[(i, j)] - y[(j, i)] + y[(j, j)];
            k += 1;
        }
    }
    out
}

/// The Gram operator `M = L*L` as a dense `p(p-1)/2` square matrix.
///
/// `M_kk = 4`; `M_kl = 1` when edges `k` and `l` share exactly one endpoint;
/// all other entries are zero. For `p >= 4` the extreme eigenvalues are `2`
/// and `2p`; at `p = 3` every off-diagonal pair shares an endpoint, giving
/// `M = 3I + 11^T` with spectrum `{3, 3, 6}`.
#[derive(Clone, Debug, PartialEq)]
pub struct GramOperatorM {
    p: usize,
    matrix: DMatrix<f64>,
}

impl GramOperatorM {
    /// Node count.
    pub fn p(&self) -> usize {
        self.p
    }

    /// Borrow the dense matrix.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Applies `M` to a vector via the dense matrix.
    pub fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.matrix.nrows() {
            return Err(Error::DimensionMismatch {
                what: "GramOperatorM::apply input",
                got: x.len(),
                expected: self.matrix.nrows(),
            });
        }
        Ok(&self.matrix * x)
    }

    /// Smallest and largest eigenvalues by a dense symmetric eigensolve.
    pub fn extreme_eigenvalues(&self) -> (f64, f64) {
        let eig = self.matrix.clone().symmetric_eigenvalues();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in eig.iter() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }
}

/// Constructs [`GramOperatorM`] from the shared-endpoint rule rather than by
/// composing `L*` with `L`, so tests can compare the two routes.
pub fn build_m(p: usize) -> Result<GramOperatorM> {
    let map = EdgeIndexMap::new(p)?;
    let m = map.edge_count();
    let pairs: Vec<(usize, usize)> = map.pairs().collect();
    let mut out = DMatrix::zeros(m, m);
    for k in 0..m {
        out[(k, k)] = 4.0;
        let (ik, jk) = pairs[k];
        for l in k + 1..m {
            let (il, jl) = pairs[l];
            let shared = usize::from(ik == il)
                + usize::from(ik == jl)
                + usize::from(jk == il)
                + usize::from(jk == jl);
            if shared == 1 {
                out[(k, l)] = 1.0;
                out[(l, k)] = 1.0;
            }
        }
    }
    Ok(GramOperatorM { p, matrix: out })
}

/// Outcome of the feasibility test for a weight vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Feasibility {
    /// `Lw + J` admits a Cholesky factorization: the graph is connected.
    Feasible,
    /// The factorization failed; the weighted graph is not connected (or so
    /// close to disconnected that it is numerically singular).
    NotPositiveDefinite,
}

impl Feasibility {
    /// Boolean view of the diagnostic.
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible)
    }
}

impl std::fmt::Display for Feasibility {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Feasibility::Feasible => write!(f, "feasible: Lw + J is positive definite"),
            Feasibility::NotPositiveDefinite => write!(
                f,
                "infeasible: Lw + J is not positive definite (graph not connected)"
            ),
        }
    }
}

/// Diagnostic feasibility check: nonnegativity is guaranteed by
/// [`WeightVector`], so this decides positive definiteness of `Lw + J` by
/// attempting a Cholesky factorization.
pub fn check_feasibility(w: &WeightVector) -> Feasibility {
    match cholesky_of_plus_j(w.p(), w.as_vector()) {
        Some(_) => Feasibility::Feasible,
        None => Feasibility::NotPositiveDefinite,
    }
}

/// Boolean feasibility test; see [`check_feasibility`].
pub fn is_feasible(w: &WeightVector) -> bool {
    check_feasibility(w).is_feasible()
}

/// Cholesky factorization of `Lw + J` on raw storage.
pub(crate) fn cholesky_of_plus_j(p: usize, w: &DVector<f64>) -> Option<Cholesky<f64, Dyn>> {
    let mut a = laplacian_of(p, w);
    add_j(&mut a);
    Cholesky::new(a)
}

/// Recovers the weight vector `x` with `Lx + (1/b)J = (Lw + bJ)^{-1}` and
/// reports the max-norm residual of that identity.
///
/// The inverse of `Lw + bJ` has constant "J part" `1/(bp)` on top of a
/// Laplacian whose edge weights are read off its off-diagonal entries; `x`
/// itself does not depend on `b`. The residual covers every entry, diagonal
/// included, so it measures how exactly the reconstruction matches the
/// inverse.
pub fn inverse_structure_check(w: &WeightVector, b: f64) -> Result<(DVector<f64>, f64)> {
    if b == 0.0 {
        return Err(Error::ZeroArgument { what: "b" });
    }
    let p = w.p();
    let pf = p as f64;
    let mut a = laplacian_of(p, w.as_vector());
    for v in a.iter_mut() {
        *v += b / pf;
    }
    let chol = Cholesky::new(a).ok_or(Error::NotPositiveDefinite)?;
    let inv = chol.inverse();

    let map = EdgeIndexMap::new(p)?;
    let mut x = DVector::zeros(map.edge_count());
    let mut k = 0;
    for j in 0..p - 1 {
        for i in j + 1..p {
            // inv_ij = [Lx]_ij + 1/(bp) = -x_k + 1/(bp)
            x[k] = 1.0 / (b * pf) - inv[(i, j)];
            k += 1;
        }
    }

    let lx = laplacian_of(p, &x);
    let mut residual: f64 = 0.0;
    for i in 0..p {
        for j in 0..p {
            let lhs = lx[(i, j)] + 1.0 / (b * pf);
            residual = residual.max((lhs - inv[(i, j)]).abs());
        }
    }
    Ok((x, residual))
}
