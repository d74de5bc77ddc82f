//! Synthetic anomaly injection: attribute flips plus edges rewired across
//! community boundaries.

use std::collections::BTreeSet;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng;

/// Attempts per added edge before giving up on it.
pub const MAX_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlipMode {
    /// Continuous values become `column_max - x`.
    #[default]
    Reflect,
    /// Continuous values become `-x`.
    Negate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InjectionConfig {
    /// Exact number of anomalies. Mutually exclusive with `anomaly_ratio`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anomaly_count: Option<usize>,
    /// Fraction of nodes made anomalous (floor). Defaults to 0.05 when
    /// neither field is given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anomaly_ratio: Option<f64>,
    pub flip_fraction: f64,
    pub rewire_fraction: f64,
    pub flip_mode: FlipMode,
    pub seed: u64,
}

pub const DEFAULT_RATIO: f64 = 0.05;

impl Default for InjectionConfig {
    fn default() -> Self {
        InjectionConfig {
            anomaly_count: None,
            anomaly_ratio: None,
            flip_fraction: 0.30,
            rewire_fraction: 0.20,
            flip_mode: FlipMode::Reflect,
            seed: 0,
        }
    }
}

impl InjectionConfig {
    pub fn with_count(count: usize, seed: u64) -> Self {
        InjectionConfig {
            anomaly_count: Some(count),
            seed,
            ..Default::default()
        }
    }

    pub fn with_ratio(ratio: f64, seed: u64) -> Self {
        InjectionConfig {
            anomaly_ratio: Some(ratio),
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.anomaly_count.is_some() && self.anomaly_ratio.is_some() {
            return Err(Error::invalid("give anomaly_count or anomaly_ratio, not both"));
        }
        for (name, v) in [
            ("anomaly_ratio", self.anomaly_ratio.unwrap_or(DEFAULT_RATIO)),
            ("flip_fraction", self.flip_fraction),
            ("rewire_fraction", self.rewire_fraction),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!("{name} = {v} not in [0, 1]")));
            }
        }
        Ok(())
    }

    /// Number of anomalies for a graph of `n` nodes.
    pub fn count_for(&self, n: usize) -> usize {
        match self.anomaly_count {
            Some(c) => c,
            None => (self.anomaly_ratio.unwrap_or(DEFAULT_RATIO) * n as f64).floor() as usize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeInjection {
    pub node: usize,
    pub original_id: i64,
    pub flipped_dims: Vec<usize>,
    /// Edges removed, as `(node, other)`.
    pub removed: Vec<(usize, usize)>,
    /// Edges added, as `(node, other)`.
    pub added: Vec<(usize, usize)>,
    /// Additions that found no valid endpoint within the attempt cap.
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectionReport {
    pub seed: u64,
    pub anomalous_nodes: Vec<usize>,
    pub flip_count: usize,
    pub nodes: Vec<NodeInjection>,
}

impl InjectionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn total_skipped(&self) -> usize {
        self.nodes.iter().map(|n| n.skipped).sum()
    }
}

fn is_binary_column(ds: &Dataset, j: usize) -> bool {
    ds.attributes.column(j).iter().all(|&v| v == 0.0 || v == 1.0)
}

/// Injects anomalies into a copy of `ds`.
///
/// `communities[v]` is the pre-injection community of node `v`; every added
/// edge joins two different communities. Randomness is keyed per node, so a
/// node's flips do not depend on the other selected nodes.
pub fn inject(
    ds: &Dataset,
    communities: &[usize],
    config: &InjectionConfig,
) -> Result<(Dataset, InjectionReport)> {
    config.validate()?;
    let n = ds.n();
    if communities.len() != n {
        return Err(Error::RowCountMismatch {
            what: "community assignment".into(),
            expected: n,
            found: communities.len(),
        });
    }
    let count = config.count_for(n);
    if count > n {
        return Err(Error::invalid(format!(
            "cannot inject {count} anomalies into a graph of {n} nodes"
        )));
    }
    let d = ds.attribute_dim();
    let flip_count = (config.flip_fraction * d as f64).floor() as usize;

    let mut select = rng::stream(config.seed, 0, "select-anomalies");
    let mut chosen = index::sample(&mut select, n, count).into_vec();
    chosen.sort_unstable();

    let col_max: Vec<f64> = (0..d)
        .map(|j| ds.attributes.column(j).fold(f64::NEG_INFINITY, |a, &b| a.max(b)))
        .collect();
    let binary: Vec<bool> = (0..d).map(|j| is_binary_column(ds, j)).collect();

    let mut attributes = ds.attributes.clone();
    let mut edges: BTreeSet<(usize, usize)> = ds.graph.edges().iter().copied().collect();
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut nodes = Vec::with_capacity(count);

    for &v in &chosen {
        let mut r = rng::stream(config.seed, v as u64, "attribute-flip");
        let mut dims = index::sample(&mut r, d, flip_count).into_vec();
        dims.sort_unstable();
        for &j in &dims {
            let x = attributes[[v, j]];
            attributes[[v, j]] = if binary[j] {
                1.0 - x
            } else {
                match config.flip_mode {
                    FlipMode::Reflect => col_max[j] - x,
                    FlipMode::Negate => -x,
                }
            };
        }

        let mut r = rng::stream(config.seed, v as u64, "rewire");
        let original = ds.graph.neighbors(v);
        let k = (config.rewire_fraction * original.len() as f64).floor() as usize;
        let still: Vec<usize> = original
            .iter()
            .copied()
            .filter(|&u| edges.contains(&key(u, v)))
            .collect();
        let k_remove = k.min(still.len());
        let mut picks = index::sample(&mut r, still.len(), k_remove).into_vec();
        picks.sort_unstable();
        let mut removed = Vec::with_capacity(k_remove);
        for p in picks {
            let u = still[p];
            edges.remove(&key(u, v));
            removed.push((v, u));
        }

        let mut added = Vec::with_capacity(k);
        let mut skipped = k - k_remove;
        for _ in 0..k_remove {
            let mut found = None;
            for _ in 0..MAX_ATTEMPTS {
                let u = r.gen_range(0..n);
                if u != v && communities[u] != communities[v] && !edges.contains(&key(u, v)) {
                    found = Some(u);
                    break;
                }
            }
            match found {
                Some(u) => {
                    edges.insert(key(u, v));
                    added.push((v, u));
                }
                None => skipped += 1,
            }
        }
        if skipped > 0 {
            log::debug!("node {v}: {skipped} rewired edge(s) skipped");
        }
        nodes.push(NodeInjection {
            node: v,
            original_id: ds.original_ids[v],
            flipped_dims: dims,
            removed,
            added,
            skipped,
        });
    }

    let mut labels = vec![0u8; n];
    for &v in &chosen {
        labels[v] = 1;
    }
    let skipped: usize = nodes.iter().map(|r: &NodeInjection| r.skipped).sum();
    if skipped > 0 {
        log::warn!("{skipped} rewired edge(s) could not be added");
    }
    let graph = Graph::new(n, edges)?;
    let perturbed = Dataset {
        name: ds.name.clone(),
        graph,
        attributes,
        labels: Some(labels),
        original_ids: ds.original_ids.clone(),
    };
    perturbed.validate()?;
    Ok((
        perturbed,
        InjectionReport {
            seed: config.seed,
            anomalous_nodes: chosen,
            flip_count,
            nodes,
        },
    ))
}
