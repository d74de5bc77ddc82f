//! Per-node structural profiles and graph-level summary statistics.

mod centrality;
mod community;
mod kcore;
mod spectral;
mod triangles;

use std::fmt::{self, Write as _};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

pub use centrality::{centralities, Centralities};
pub use community::{communities, MAX_ROUNDS as MAX_PROPAGATION_ROUNDS};
pub use kcore::kcore_numbers;
pub use spectral::{fiedler_value, FIEDLER_TOL};
pub use triangles::triangles_and_clustering;

use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Hub,
    Bridge,
    CoreMember,
    Peripheral,
    Regular,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Hub => "hub",
            Role::Bridge => "bridge",
            Role::CoreMember => "core member",
            Role::Peripheral => "peripheral node",
            Role::Regular => "regular node",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Everything the narration templates say about one node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructProfile {
    pub node_id: i64,
    pub degree: usize,
    pub degree_percentile: f64,
    pub degree_rank: usize,
    pub triangles: usize,
    pub clustering: f64,
    pub kcore: usize,
    pub community: usize,
    pub degree_centrality: f64,
    pub closeness_centrality: f64,
    pub betweenness_centrality: f64,
    /// Percentiles of degree, closeness and betweenness centrality.
    pub centrality_percentiles: [f64; 3],
    pub ego_size: usize,
    pub ego_avg_degree: f64,
    pub ego_std_degree: f64,
    pub hub_rank: Option<usize>,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub n: usize,
    pub m: usize,
    pub fiedler: f64,
    pub num_communities: usize,
    pub max_core: usize,
    pub directed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileConfig {
    /// Number of top-degree nodes that receive a hub rank.
    pub hub_top_h: usize,
    /// Worker threads for the centrality passes; 1 is bit-reproducible.
    pub threads: usize,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        ProfileConfig {
            hub_top_h: 3,
            threads: 1,
        }
    }
}

/// Role cutoffs.
pub const HUB_PERCENTILE: f64 = 99.0;
pub const BRIDGE_PERCENTILE: f64 = 90.0;
pub const BRIDGE_MAX_CLUSTERING: f64 = 0.3;
pub const PERIPHERAL_MAX_PERCENTILE: f64 = 25.0;

/// `(ego_size, mean neighbor degree, population std of neighbor degree)`.
pub fn ego_stats(g: &Graph) -> Vec<(usize, f64, f64)> {
    (0..g.n())
        .map(|v| {
            let nb = g.neighbors(v);
            if nb.is_empty() {
                return (0, 0.0, 0.0);
            }
            let k = nb.len() as f64;
            let mean = nb.iter().map(|&u| g.degree(u) as f64).sum::<f64>() / k;
            let var = nb
                .iter()
                .map(|&u| {
                    let d = g.degree(u) as f64 - mean;
                    d * d
                })
                .sum::<f64>()
                / k;
            (nb.len(), mean, var.sqrt())
        })
        .collect()
}

/// Percent of values strictly smaller than each value; ties share a rank.
pub fn percentile_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    values
        .iter()
        .map(|&x| 100.0 * sorted.partition_point(|&v| v < x) as f64 / n as f64)
        .collect()
}

fn assign_role(p: &StructProfile, max_core: usize, min_core: usize) -> Role {
    let betweenness_pct = p.centrality_percentiles[2];
    if p.degree_percentile >= HUB_PERCENTILE || p.hub_rank.is_some() {
        Role::Hub
    } else if betweenness_pct >= BRIDGE_PERCENTILE && p.clustering < BRIDGE_MAX_CLUSTERING {
        Role::Bridge
    } else if p.kcore == max_core && max_core > min_core {
        Role::CoreMember
    } else if p.kcore == 1 && p.degree_percentile <= PERIPHERAL_MAX_PERCENTILE {
        Role::Peripheral
    } else {
        Role::Regular
    }
}

/// Hub ranks for the `h` highest-degree nodes whose degree exceeds the mean
/// degree; ties broken by node id.
fn hub_ranks(g: &Graph, h: usize) -> Vec<Option<usize>> {
    let n = g.n();
    let mut ranks = vec![None; n];
    if n == 0 {
        return ranks;
    }
    let mean = 2.0 * g.m() as f64 / n as f64;
    let mut candidates: Vec<usize> = (0..n).filter(|&v| g.degree(v) as f64 > mean).collect();
    candidates.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));
    for (rank, &v) in candidates.iter().take(h).enumerate() {
        ranks[v] = Some(rank + 1);
    }
    ranks
}

/// Computes every per-node feature plus the graph summary.
///
/// `seed` is forwarded to community detection. Node ids in the profiles are
/// the dense ids `0..n`; callers holding original ids overwrite `node_id`.
pub fn build_profiles(
    g: &Graph,
    seed: u64,
    config: &ProfileConfig,
) -> (Vec<StructProfile>, GraphSummary) {
    let n = g.n();
    let degrees = g.degree_vector();
    let (tri, clustering) = triangles_and_clustering(g);
    let cores = kcore_numbers(g);
    let comm = communities(g, seed);
    let cent = centralities(g, config.threads);
    let ego = ego_stats(g);
    let hubs = hub_ranks(g, config.hub_top_h);

    let deg_f: Vec<f64> = degrees.iter().map(|&d| d as f64).collect();
    let deg_pct = percentile_ranks(&deg_f);
    let mut sorted_deg = degrees.clone();
    sorted_deg.sort_unstable();
    let clo_pct = percentile_ranks(&cent.closeness);
    let bet_pct = percentile_ranks(&cent.betweenness);

    let max_core = cores.iter().copied().max().unwrap_or(0);
    let min_core = cores.iter().copied().min().unwrap_or(0);
    let fiedler = if n >= 2 {
        fiedler_value(g).expect("n >= 2")
    } else {
        0.0
    };
    let summary = GraphSummary {
        n,
        m: g.m(),
        fiedler,
        num_communities: comm.iter().copied().max().map_or(0, |c| c + 1),
        max_core,
        directed: false,
    };

    let profiles = (0..n)
        .map(|v| {
            let mut p = StructProfile {
                node_id: v as i64,
                degree: degrees[v],
                degree_percentile: deg_pct[v],
                degree_rank: 1 + n - sorted_deg.partition_point(|&d| d <= degrees[v]),
                triangles: tri[v],
                clustering: clustering[v],
                kcore: cores[v],
                community: comm[v],
                degree_centrality: cent.degree[v],
                closeness_centrality: cent.closeness[v],
                betweenness_centrality: cent.betweenness[v],
                centrality_percentiles: [deg_pct[v], clo_pct[v], bet_pct[v]],
                ego_size: ego[v].0,
                ego_avg_degree: ego[v].1,
                ego_std_degree: ego[v].2,
                hub_rank: hubs[v],
                role: Role::Regular,
            };
            p.role = assign_role(&p, max_core, min_core);
            p
        })
        .collect();
    (profiles, summary)
}

pub const PROFILE_CSV_HEADER: &str = "node_id,degree,degree_percentile,degree_rank,triangles,\
clustering,kcore,community,degree_centrality,closeness_centrality,betweenness_centrality,\
degree_centrality_percentile,closeness_percentile,betweenness_percentile,ego_size,\
ego_avg_degree,ego_std_degree,hub_rank,role";

/// One CSV row per node in the fixed column order of [`PROFILE_CSV_HEADER`].
pub fn profiles_to_csv(profiles: &[StructProfile]) -> String {
    let mut out = String::from(PROFILE_CSV_HEADER);
    out.push('\n');
    for p in profiles {
        let role = serde_json::to_value(p.role).expect("role serializes");
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            p.node_id,
            p.degree,
            p.degree_percentile,
            p.degree_rank,
            p.triangles,
            p.clustering,
            p.kcore,
            p.community,
            p.degree_centrality,
            p.closeness_centrality,
            p.betweenness_centrality,
            p.centrality_percentiles[0],
            p.centrality_percentiles[1],
            p.centrality_percentiles[2],
            p.ego_size,
            p.ego_avg_degree,
            p.ego_std_degree,
            p.hub_rank.map(|r| r.to_string()).unwrap_or_default(),
            role.as_str().unwrap_or_default(),
        );
    }
    out
}

/// Numeric structural features, one row per node, for the attribute-only
/// ablation. Columns: degree, triangles, clustering, k-core, degree /
/// closeness / betweenness centrality, ego size, ego mean and std degree.
pub fn profile_feature_matrix(profiles: &[StructProfile]) -> Array2<f64> {
    const COLS: usize = 10;
    let mut m = Array2::zeros((profiles.len(), COLS));
    for (i, p) in profiles.iter().enumerate() {
        let row = [
            p.degree as f64,
            p.triangles as f64,
            p.clustering,
            p.kcore as f64,
            p.degree_centrality,
            p.closeness_centrality,
            p.betweenness_centrality,
            p.ego_size as f64,
            p.ego_avg_degree,
            p.ego_std_degree,
        ];
        for (j, v) in row.into_iter().enumerate() {
            m[[i, j]] = v;
        }
    }
    m
}
