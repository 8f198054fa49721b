//! Ground-truth graph generation and sampling from the induced
//! improper Gaussian Markov random field.
//!
//! A weighted connected graph with Laplacian `L(w*)` defines a degenerate
//! Gaussian whose precision matrix is `L(w*)` and whose support is the
//! hyperplane `{x : sum(x) = 0}`. This module provides two synthetic graph
//! families (preferential-attachment trees and modular graphs), an exact
//! sampler for the degenerate model, and the empirical second-moment
//! matrices fed to the estimators.
//!
//! All randomness flows through seeds derived with [`derive_seed`], so every
//! artifact is reproducible bit-for-bit from a base seed and a few integer
//! coordinates (realization index, sample-set index, ...), independent of
//! thread scheduling.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::graph::{self, edge_count, EdgeIndexMap, WeightVector};

/// Mixes one 64-bit word into a well-scrambled output (a splitmix64 step).
fn mix(z: u64) -> u64 {
    let mut z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Derives an independent stream seed from a base seed and a path of
/// integer coordinates.
///
/// Distinct coordinate paths give unrelated seeds, which lets callers hand
/// out per-realization and per-sample-set generators that do not depend on
/// how work is scheduled across threads.
pub fn derive_seed(base: u64, words: &[u64]) -> u64 {
    let mut h = mix(base);
    for &w in words {
        h = mix(h ^ w);
    }
    h
}

/// A connected weighted graph on `p` nodes serving as ground truth.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruthGraph {
    weights: WeightVector,
}

impl GroundTruthGraph {
    /// Wraps a weight vector, rejecting graphs whose positive-weight edges
    /// do not connect all `p` nodes.
    pub fn from_weights(weights: WeightVector) -> Result<Self> {
        if !support_is_connected(&weights) {
            return Err(Error::DisconnectedGraph);
        }
        Ok(Self { weights })
    }

    /// Number of nodes.
    pub fn p(&self) -> usize {
        self.weights.p()
    }

    /// The edge-weight vector (length `p(p-1)/2`, zeros on absent edges).
    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    /// Number of edges with strictly positive weight.
    pub fn n_edges(&self) -> usize {
        self.weights.support(0.0).len()
    }

    /// The graph Laplacian `L(w*)`.
    pub fn laplacian(&self) -> DMatrix<f64> {
        graph::apply_l(&self.weights).into_matrix()
    }
}

/// Breadth-first connectivity of the positive-weight support.
fn support_is_connected(weights: &WeightVector) -> bool {
    let p = weights.p();
    let map = EdgeIndexMap::new(p).expect("WeightVector guarantees p >= 2");
    let mut adjacency = vec![Vec::new(); p + 1];
    for (k, (i, j)) in map.pairs().enumerate() {
        if weights[k] > 0.0 {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
    }
    let mut seen = vec![false; p + 1];
    let mut queue = std::collections::VecDeque::from([1_usize]);
    seen[1] = true;
    let mut count = 0;
    while let Some(v) = queue.pop_front() {
        count += 1;
        for &u in &adjacency[v] {
            if !seen[u] {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    count == p
}

fn validate_weight_range(range: (f64, f64)) -> Result<()> {
    let (lo, hi) = range;
    if !lo.is_finite() || !hi.is_finite() || lo <= 0.0 || lo > hi {
        return Err(Error::InvalidWeightRange { lo, hi });
    }
    Ok(())
}

fn validate_probability(what: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || !(0.0..=1.0).contains(&value) {
        return Err(Error::InvalidProbability { what, value });
    }
    Ok(())
}

/// Generates a preferential-attachment tree on `p` nodes.
///
/// Node 2 attaches to node 1; each later node attaches to a single existing
/// node chosen with probability proportional to its current degree. Every
/// edge weight is drawn uniformly from `weight_range` (inclusive). The
/// result always has exactly `p - 1` edges and is connected by
/// construction.
pub fn generate_ba_tree(
    p: usize,
    weight_range: (f64, f64),
    seed: u64,
) -> Result<GroundTruthGraph> {
    if p < 2 {
        return Err(Error::InvalidNodeCount(p));
    }
    validate_weight_range(weight_range)?;
    let (lo, hi) = weight_range;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let map = EdgeIndexMap::new(p)?;
    let mut w = DVector::zeros(edge_count(p));
    let mut degree = vec![0_usize; p + 1];

    for t in 2..=p {
        let target = if t == 2 {
            1
        } else {
            // Total degree over nodes 1..t-1 is twice the t-2 edges placed
            // so far; walk the cumulative degrees to pick proportionally.
            let total = 2 * (t - 2);
            let mut ticket = rng.random_range(0..total);
            let mut chosen = 0;
            for v in 1..t {
                if ticket < degree[v] {
                    chosen = v;
                    break;
                }
                ticket -= degree[v];
            }
            debug_assert!(chosen >= 1);
            chosen
        };
        let weight = rng.random_range(lo..=hi);
        let k = map.edge_index(t, target)?;
        w[k - 1] = weight;
        degree[t] += 1;
        degree[target] += 1;
    }

    GroundTruthGraph::from_weights(WeightVector::new(p, w)?)
}

/// Generates a modular (stochastic-block style) graph on `p` nodes.
///
/// Nodes are split into `n_modules` contiguous blocks of near-equal size
/// (earlier blocks absorb the remainder). Each within-block pair is an edge
/// with probability `p_intra`, each cross-block pair with probability
/// `p_inter`; edge weights are uniform on `weight_range`. If the draw
/// leaves the graph disconnected, bridge edges between random nodes of
/// random distinct components are added (same weight law) until it is
/// connected.
pub fn generate_modular(
    p: usize,
    n_modules: usize,
    p_intra: f64,
    p_inter: f64,
    weight_range: (f64, f64),
    seed: u64,
) -> Result<GroundTruthGraph> {
    if p < 2 {
        return Err(Error::InvalidNodeCount(p));
    }
    if n_modules == 0 {
        return Err(Error::ZeroArgument { what: "n_modules" });
    }
    if n_modules > p {
        return Err(Error::TooManyModules { n_modules, p });
    }
    validate_probability("p_intra", p_intra)?;
    validate_probability("p_inter", p_inter)?;
    validate_weight_range(weight_range)?;
    let (lo, hi) = weight_range;

    // Contiguous block assignment: the first `p % n_modules` blocks get one
    // extra node.
    let base = p / n_modules;
    let rem = p % n_modules;
    let mut module = vec![0_usize; p + 1];
    let mut node = 1;
    for m in 0..n_modules {
        let size = base + usize::from(m < rem);
        for _ in 0..size {
            module[node] = m;
            node += 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let map = EdgeIndexMap::new(p)?;
    let mut w = DVector::zeros(edge_count(p));
    for (k, (i, j)) in map.pairs().enumerate() {
        let prob = if module[i] == module[j] { p_intra } else { p_inter };
        if rng.random_bool(prob) {
            w[k] = rng.random_range(lo..=hi);
        }
    }

    // Connectivity repair: merge random component pairs with bridge edges.
    let mut components = initial_components(p, &map, &w);
    while components.len() > 1 {
        let a = rng.random_range(0..components.len());
        let mut b = rng.random_range(0..components.len() - 1);
        if b >= a {
            b += 1;
        }
        let node_a = components[a][rng.random_range(0..components[a].len())];
        let node_b = components[b][rng.random_range(0..components[b].len())];
        let (i, j) = (node_a.max(node_b), node_a.min(node_b));
        let k = map.edge_index(i, j)?;
        debug_assert_eq!(w[k - 1], 0.0, "bridge endpoints are in distinct components");
        w[k - 1] = rng.random_range(lo..=hi);

        let (keep, drop) = (a.min(b), a.max(b));
        let absorbed = components.remove(drop);
        components[keep].extend(absorbed);
        components[keep].sort_unstable();
        components.sort_unstable_by_key(|c| c[0]);
    }

    GroundTruthGraph::from_weights(WeightVector::new(p, w)?)
}

/// Connected components of the positive-weight support, each sorted
/// ascending, the list sorted by smallest member.
fn initial_components(p: usize, map: &EdgeIndexMap, w: &DVector<f64>) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..=p).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
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
    for (k, (i, j)) in map.pairs().enumerate() {
        if w[k] > 0.0 {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for v in 1..=p {
        let root = find(&mut parent, v);
        groups.entry(root).or_default().push(v);
    }
    groups.into_values().collect()
}

/// A matrix of `n` samples (columns) from the degenerate model on `p`
/// nodes, along with its sample covariance; every column sums to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    p: usize,
    n: usize,
    samples: DMatrix<f64>,
    covariance: DMatrix<f64>,
}

impl SampleSet {
    /// Number of variables.
    pub fn p(&self) -> usize {
        self.p
    }

    /// Number of samples.
    pub fn n(&self) -> usize {
        self.n
    }

    /// The `p x n` sample matrix, one sample per column.
    pub fn samples(&self) -> &DMatrix<f64> {
        &self.samples
    }

    /// The sample covariance `(1/n) * X * transpose(X)`.
    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }
}

/// Draws `n` exact samples from the degenerate Gaussian whose precision is
/// the graph Laplacian of `graph`.
///
/// Each sample solves `transpose(C) * y = zeta` with `C` the Cholesky
/// factor of `L(w*) + J` (`J = (1/p) * ones`) and `zeta` standard normal,
/// then removes the mean so the sample lies on the zero-sum hyperplane. The
/// resulting population covariance is the Moore-Penrose pseudo-inverse of
/// `L(w*)`.
pub fn sample_lgmrf(graph: &GroundTruthGraph, n: usize, seed: u64) -> Result<SampleSet> {
    if n == 0 {
        return Err(Error::ZeroSamples);
    }
    let p = graph.p();
    let mut theta = graph.laplacian();
    for v in theta.iter_mut() {
        *v += 1.0 / p as f64;
    }
    let chol = nalgebra::Cholesky::new(theta).ok_or(Error::NotPositiveDefinite)?;
    let l_factor = chol.l();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = DMatrix::zeros(p, n);
    for c in 0..n {
        let zeta = DVector::from_fn(p, |_, _| rng.sample::<f64, _>(StandardNormal));
        // transpose(C) is upper triangular; back-substitute in place.
        let mut y = zeta;
        for row in (0..p).rev() {
            let mut acc = y[row];
            for col in row + 1..p {
                acc -= l_factor[(col, row)] * y[col];
            }
            y[row] = acc / l_factor[(row, row)];
        }
        let mean = y.sum() / p as f64;
        for v in y.iter_mut() {
            *v -= mean;
        }
        samples.set_column(c, &y);
    }
    let covariance = sample_covariance(&samples)?;
    Ok(SampleSet {
        p,
        n,
        samples,
        covariance,
    })
}

/// The empirical second-moment matrix `S = (1/n) * X * transpose(X)` of a
/// `p x n` data matrix (one sample per column).
///
/// No mean is subtracted: synthetic samples are centered by construction,
/// and real-data centering is the caller's explicit choice.
pub fn sample_covariance(x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if x.ncols() == 0 {
        return Err(Error::ZeroSamples);
    }
    Ok((x * x.transpose()) / x.ncols() as f64)
}

/// The sample correlation matrix of a `p x n` data matrix:
/// `R_ij = S_ij / sqrt(S_ii * S_jj)` with `S` the sample covariance and
/// the diagonal set to exactly 1.
///
/// Fails with the 1-based index of any row whose variance is zero,
/// negative, or not finite.
pub fn correlation_matrix(x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let s = sample_covariance(x)?;
    let p = s.nrows();
    let mut scale = Vec::with_capacity(p);
    for i in 0..p {
        let v = s[(i, i)];
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::ZeroVarianceRow(i + 1));
        }
        scale.push(v.sqrt());
    }
    let mut r = DMatrix::zeros(p, p);
    for i in 0..p {
        for j in 0..p {
            r[(i, j)] = if i == j {
                1.0
            } else {
                s[(i, j)] / (scale[i] * scale[j])
            };
        }
    }
    Ok(r)
}
