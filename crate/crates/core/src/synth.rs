//! Synthetic attributed graphs for examples, tests, and benchmarks.

use std::collections::BTreeSet;

use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng;

/// Stochastic block model with block-correlated binary attributes.
///
/// Attribute dimensions are split evenly between blocks; a node turns on
/// each dimension of its own block's share with probability `attr_p_in`
/// and every other dimension with probability `attr_p_out`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SbmConfig {
    pub blocks: usize,
    pub block_size: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub dim: usize,
    pub attr_p_in: f64,
    pub attr_p_out: f64,
    pub seed: u64,
}

impl Default for SbmConfig {
    fn default() -> Self {
        SbmConfig {
            blocks: 2,
            block_size: 250,
            p_in: 0.04,
            p_out: 0.004,
            dim: 64,
            attr_p_in: 0.3,
            attr_p_out: 0.03,
            seed: 0,
        }
    }
}

impl SbmConfig {
    pub fn n(&self) -> usize {
        self.blocks * self.block_size
    }

    fn validate(&self) -> Result<()> {
        if self.blocks == 0 || self.block_size == 0 || self.dim == 0 {
            return Err(Error::invalid("blocks, block_size and dim must be positive"));
        }
        for p in [self.p_in, self.p_out, self.attr_p_in, self.attr_p_out] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(format!("probability {p} not in [0, 1]")));
            }
        }
        Ok(())
    }
}

fn block_attributes(
    n: usize,
    dim: usize,
    blocks: usize,
    block_of: impl Fn(usize) -> usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Array2<f64> {
    let mut x = Array2::zeros((n, dim));
    for v in 0..n {
        let mut r = rng::stream(seed, v as u64, "synth-attributes");
        let b = block_of(v);
        for j in 0..dim {
            let own = j * blocks / dim == b;
            if r.gen::<f64>() < if own { p_in } else { p_out } {
                x[[v, j]] = 1.0;
            }
        }
    }
    x
}

/// Returns the dataset and the planted block of each node.
pub fn sbm(cfg: &SbmConfig) -> Result<(Dataset, Vec<usize>)> {
    cfg.validate()?;
    let n = cfg.n();
    let block_of = |v: usize| v / cfg.block_size;
    let mut r = rng::stream(cfg.seed, 0, "synth-edges");
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if block_of(u) == block_of(v) { cfg.p_in } else { cfg.p_out };
            if r.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    let graph = Graph::new(n, edges)?;
    let x = block_attributes(n, cfg.dim, cfg.blocks, block_of, cfg.attr_p_in, cfg.attr_p_out, cfg.seed);
    let blocks = (0..n).map(block_of).collect();
    Ok((Dataset::new(format!("sbm-{}x{}", cfg.blocks, cfg.block_size), graph, x, None)?, blocks))
}

pub const CORA_NODES: usize = 2708;
pub const CORA_EDGES: usize = 5429;
pub const CORA_FEATURES: usize = 1433;
pub const CORA_ANOMALIES: usize = 150;

/// A graph with the node, edge, and feature counts of Cora: seven
/// communities, mostly intra-community edges, sparse binary features.
/// Returns the planted community of every node alongside.
pub fn cora_like(seed: u64) -> Result<(Dataset, Vec<usize>)> {
    let (n, m, d, k) = (CORA_NODES, CORA_EDGES, CORA_FEATURES, 7);
    let block_of = |v: usize| v * k / n;
    let mut r = rng::stream(seed, 0, "cora-edges");
    let mut edges = BTreeSet::new();
    while edges.len() < m {
        let u = r.gen_range(0..n);
        let v = if r.gen::<f64>() < 0.8 {
            let b = block_of(u);
            let lo = (b * n).div_ceil(k);
            let hi = ((b + 1) * n).div_ceil(k);
            r.gen_range(lo..hi)
        } else {
            r.gen_range(0..n)
        };
        if u != v {
            edges.insert((u.min(v), u.max(v)));
        }
    }
    let graph = Graph::new(n, edges)?;
    let x = block_attributes(n, d, k, block_of, 0.05, 0.005, seed);
    let blocks = (0..n).map(block_of).collect();
    Ok((Dataset::new("cora-like", graph, x, None)?, blocks))
}
