//! JSON experiment configuration for the `synthetic` subcommand.
//!
//! A config is a single JSON document; every field has a default except the
//! penalty, so a minimal sweep needs only `{"penalty": {"kind": "mcp"}}`
//! plus an output path (in the file or via `--output`). See the committed
//! example config for a full document.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use laplearn::penalty::{PenaltyKind, PenaltySpec};
use laplearn::solver::{InitStrategy, SolverOptions};

use crate::error::{CliError, Result};

/// Where the ground-truth graph of each realization comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphConfig {
    /// Preferential-attachment tree (one new edge per node).
    BaTree,
    /// Modular graph with intra/inter-module edge probabilities.
    Modular {
        n_modules: usize,
        p_intra: f64,
        p_inter: f64,
    },
    /// A fixed graph read from an `i,j,weight` edge-list CSV; realizations
    /// then differ only in the sampled data.
    FromFile { path: PathBuf },
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig::BaTree
    }
}

/// Penalty family and concavity; the regularization level comes from the
/// config's `lambda` list, one fit per value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PenaltyConfig {
    pub kind: PenaltyKind,
    /// Concavity parameter; omitted means the per-kind default.
    #[serde(default)]
    pub gamma: Option<f64>,
}

impl PenaltyConfig {
    /// Builds the concrete penalty for one lambda.
    pub fn spec(&self, lambda: f64) -> Result<PenaltySpec> {
        Ok(PenaltySpec::new(self.kind, lambda, self.gamma)?)
    }
}

/// Full description of one synthetic experiment sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    /// Ground-truth graph family.
    pub graph: GraphConfig,
    /// Number of nodes.
    pub p: usize,
    /// Sample-size ratios; each gives `n = round(n_over_p * p)` samples.
    pub n_over_p: Vec<f64>,
    /// Regularization levels, one fit per value.
    pub lambda: Vec<f64>,
    /// Penalty family (lambda comes from the list above).
    pub penalty: PenaltyConfig,
    /// Monte Carlo repetitions.
    pub n_realizations: usize,
    /// Base seed; realization `r` derives all of its randomness from it.
    pub base_seed: u64,
    /// Uniform weight range for generated graphs.
    pub weight_range: (f64, f64),
    /// Solver initial point strategy. Defaults to the all-ones start, which
    /// makes the first reweighted subproblem a (near-)unpenalized fit that the
    /// later steps prune; sparse starts can strand hub weights beyond the
    /// penalty knee at small sample sizes.
    pub init: InitStrategy,
    /// Inner/outer solver options.
    pub solver: SolverOptions,
    /// Results CSV destination (the aggregate lands next to it).
    pub output_path: Option<PathBuf>,
    /// Report `ms = 0` in all rows so outputs are byte-reproducible.
    pub deterministic_timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            graph: GraphConfig::default(),
            p: 50,
            n_over_p: vec![100.0],
            lambda: vec![0.25],
            penalty: PenaltyConfig {
                kind: PenaltyKind::Mcp,
                gamma: None,
            },
            n_realizations: 1,
            base_seed: 0,
            weight_range: (2.0, 5.0),
            init: InitStrategy::Dense,
            solver: SolverOptions::default(),
            output_path: None,
            deterministic_timing: false,
        }
    }
}

impl ExperimentConfig {
    /// Parses a JSON config file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config {
            path: path.display().to_string(),
            source: e,
        })
    }

    /// Rejects impossible sweeps before any work starts.
    pub fn validate(&self) -> Result<()> {
        if self.p < 2 {
            return Err(CliError::InvalidConfig(format!(
                "p = {} but at least 2 nodes are required",
                self.p
            )));
        }
        if self.n_over_p.is_empty() {
            return Err(CliError::InvalidConfig("n_over_p list is empty".into()));
        }
        for &q in &self.n_over_p {
            if !q.is_finite() || q <= 0.0 {
                return Err(CliError::InvalidConfig(format!(
                    "n_over_p entry {q} is not a positive number"
                )));
            }
        }
        if self.lambda.is_empty() {
            return Err(CliError::InvalidConfig("lambda list is empty".into()));
        }
        for &l in &self.lambda {
            if !l.is_finite() || l < 0.0 {
                return Err(CliError::InvalidConfig(format!(
                    "lambda entry {l} is not a nonnegative number"
                )));
            }
            // Also validates gamma against the penalty kind.
            self.penalty.spec(l)?;
        }
        if self.n_realizations == 0 {
            return Err(CliError::InvalidConfig(
                "n_realizations must be at least 1".into(),
            ));
        }
        self.solver.validate().map_err(laplearn::Error::from)?;
        if let GraphConfig::Modular {
            n_modules,
            p_intra,
            p_inter,
        } = self.graph
        {
            if n_modules == 0 || n_modules > self.p {
                return Err(CliError::InvalidConfig(format!(
                    "n_modules = {n_modules} is outside 1..={}",
                    self.p
                )));
            }
            for (name, v) in [("p_intra", p_intra), ("p_inter", p_inter)] {
                if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                    return Err(CliError::InvalidConfig(format!(
                        "{name} = {v} is not a probability"
                    )));
                }
            }
        }
        let (lo, hi) = self.weight_range;
        if !lo.is_finite() || !hi.is_finite() || lo <= 0.0 || lo > hi {
            return Err(CliError::InvalidConfig(format!(
                "weight_range ({lo}, {hi}) must satisfy 0 < lo <= hi"
            )));
        }
        Ok(())
    }

    /// Number of samples for one `n_over_p` entry.
    pub fn samples_for(&self, n_over_p: f64) -> usize {
        ((n_over_p * self.p as f64).round() as usize).max(1)
    }
}
