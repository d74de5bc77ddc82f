//! Sentence templates that describe a node's structural profile in prose.
//!
//! Sentences are emitted in a fixed canonical order (identity, degree,
//! triangles, clustering, k-core, community, centrality, ego network, hub
//! status, spectral summary). Content flags drop whole sentences; every other
//! sentence is rendered byte-identically regardless of which flags are set.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{GraphSummary, Role, StructProfile};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureTag {
    Identity,
    Degree,
    Triangles,
    Clustering,
    KCore,
    Community,
    Centrality,
    Ego,
    Hub,
    Fiedler,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Style {
    /// Fluent sentences.
    #[default]
    Narrative,
    /// Section headers with `|`-delimited fields, one section per line.
    Profile,
}

impl Style {
    fn separator(self) -> &'static str {
        match self {
            Style::Narrative => " ",
            Style::Profile => "\n",
        }
    }
}

/// Prompt-ablation switches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContentFlag {
    Degree,
    TrianglesClustering,
    KCore,
    Centrality,
    TopHub,
}

impl ContentFlag {
    pub const ALL: [ContentFlag; 5] = [
        ContentFlag::Degree,
        ContentFlag::TrianglesClustering,
        ContentFlag::KCore,
        ContentFlag::Centrality,
        ContentFlag::TopHub,
    ];

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "deg" | "degree" => Some(ContentFlag::Degree),
            "tc" | "triangles-clustering" => Some(ContentFlag::TrianglesClustering),
            "kcore" | "k-core" => Some(ContentFlag::KCore),
            "cen" | "centrality" => Some(ContentFlag::Centrality),
            "tophub" | "top-hub" => Some(ContentFlag::TopHub),
            _ => None,
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            ContentFlag::Degree => "deg",
            ContentFlag::TrianglesClustering => "tc",
            ContentFlag::KCore => "kcore",
            ContentFlag::Centrality => "cen",
            ContentFlag::TopHub => "tophub",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct NarrationConfig {
    pub include_degree: bool,
    pub include_triangles_clustering: bool,
    pub include_kcore: bool,
    pub include_centrality: bool,
    pub include_tophub: bool,
    pub style: Style,
    /// Seeds an independent per-node permutation of the non-identity sentences.
    pub shuffle_seed: Option<u64>,
    pub hub_top_h: usize,
}

impl Default for NarrationConfig {
    fn default() -> Self {
        NarrationConfig {
            include_degree: true,
            include_triangles_clustering: true,
            include_kcore: true,
            include_centrality: true,
            include_tophub: true,
            style: Style::Narrative,
            shuffle_seed: None,
            hub_top_h: 3,
        }
    }
}

impl NarrationConfig {
    pub fn without(mut self, flag: ContentFlag) -> Self {
        *self.flag_mut(flag) = false;
        self
    }

    fn flag_mut(&mut self, flag: ContentFlag) -> &mut bool {
        match flag {
            ContentFlag::Degree => &mut self.include_degree,
            ContentFlag::TrianglesClustering => &mut self.include_triangles_clustering,
            ContentFlag::KCore => &mut self.include_kcore,
            ContentFlag::Centrality => &mut self.include_centrality,
            ContentFlag::TopHub => &mut self.include_tophub,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let any = self.include_degree
            || self.include_triangles_clustering
            || self.include_kcore
            || self.include_centrality
            || self.include_tophub;
        if !any {
            return Err(Error::invalid("narration needs at least one content flag"));
        }
        Ok(())
    }
}

/// Byte range of one sentence (including its trailing separator) in
/// [`NodeNarrative::text`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceSpan {
    pub tag: FeatureTag,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeNarrative {
    pub node_id: i64,
    pub text: String,
    pub sentence_spans: Vec<SentenceSpan>,
}

impl NodeNarrative {
    fn assemble(node_id: i64, sentences: Vec<(FeatureTag, String)>, sep: &str) -> Self {
        let mut text = String::new();
        let mut spans = Vec::with_capacity(sentences.len());
        let last = sentences.len().saturating_sub(1);
        for (i, (tag, s)) in sentences.into_iter().enumerate() {
            let start = text.len();
            text.push_str(&s);
            if i < last {
                text.push_str(sep);
            }
            spans.push(SentenceSpan {
                tag,
                start,
                end: text.len(),
            });
        }
        NodeNarrative {
            node_id,
            text,
            sentence_spans: spans,
        }
    }

    /// The sentences with their tags, separators stripped.
    pub fn sentences(&self) -> impl Iterator<Item = (FeatureTag, &str)> + '_ {
        self.sentence_spans
            .iter()
            .map(|s| (s.tag, self.text[s.start..s.end].trim_end()))
    }
}

/// Coarse "top X%" grade for a strict-fraction percentile.
pub fn top_grade(percentile: f64) -> Option<u32> {
    if percentile >= 99.0 {
        Some(1)
    } else if percentile >= 90.0 {
        Some(10)
    } else if percentile >= 75.0 {
        Some(25)
    } else {
        None
    }
}

/// Qualitative label for a clustering coefficient.
pub fn cohesion_label(c: f64) -> &'static str {
    if c >= 0.6 {
        "high"
    } else if c >= 0.3 {
        "moderate"
    } else {
        "low"
    }
}

fn r3(x: f64) -> String {
    format!("{x:.3}")
}

fn grade_suffix(pct: f64) -> String {
    top_grade(pct)
        .map(|g| format!(", top {g}%"))
        .unwrap_or_default()
}

fn narrative_sentences(
    p: &StructProfile,
    s: &GraphSummary,
    cfg: &NarrationConfig,
) -> Vec<(FeatureTag, String)> {
    let mut out = Vec::with_capacity(10);
    out.push((
        FeatureTag::Identity,
        format!(
            "Node {} is a vertex in an undirected graph with {} nodes and {} edges.",
            p.node_id, s.n, s.m
        ),
    ));
    if cfg.include_degree {
        let text = match top_grade(p.degree_percentile) {
            Some(g) => format!(
                "It has a degree of {}, placing it in the top {}% of all nodes by connectivity.",
                p.degree, g
            ),
            None => format!(
                "It has a degree of {}, ranking {} out of {} nodes by connectivity.",
                p.degree, p.degree_rank, s.n
            ),
        };
        out.push((FeatureTag::Degree, text));
    }
    if cfg.include_triangles_clustering {
        let text = if p.triangles > 0 {
            format!(
                "This node participates in {} triangles, so it sits inside closely knit local clusters.",
                p.triangles
            )
        } else {
            "This node participates in 0 triangles.".to_string()
        };
        out.push((FeatureTag::Triangles, text));
        let text = if p.degree >= 2 {
            let label = cohesion_label(p.clustering);
            let share = match label {
                "high" => "most",
                "moderate" => "a fair share",
                _ => "few",
            };
            format!(
                "With a local clustering coefficient of {} ({label} cohesion), {share} of its neighbors are linked to each other.",
                r3(p.clustering)
            )
        } else {
            format!("Its local clustering coefficient is {}.", r3(p.clustering))
        };
        out.push((FeatureTag::Clustering, text));
    }
    if cfg.include_kcore {
        let text = if p.kcore > 0 {
            format!(
                "It resides in the k-core layer {k}, staying connected while nodes of degree below {k} are peeled away.",
                k = p.kcore
            )
        } else {
            "It resides in the k-core layer 0.".to_string()
        };
        out.push((FeatureTag::KCore, text));
    }
    out.push((
        FeatureTag::Community,
        format!(
            "It belongs to community {} of the {} communities found in the graph.",
            p.community, s.num_communities
        ),
    ));
    if cfg.include_centrality {
        let [dp, cp, bp] = p.centrality_percentiles;
        let bridge = if p.role == Role::Bridge {
            ", which marks it as a critical bridge"
        } else {
            ""
        };
        out.push((
            FeatureTag::Centrality,
            format!(
                "Centrality analysis: degree centrality ({}{}), closeness centrality ({}{}), betweenness centrality ({}{}){bridge}.",
                r3(p.degree_centrality),
                grade_suffix(dp),
                r3(p.closeness_centrality),
                grade_suffix(cp),
                r3(p.betweenness_centrality),
                grade_suffix(bp),
            ),
        ));
    }
    let ego = if p.ego_size > 0 {
        format!(
            "In its 1-hop ego network it has {} neighbors with an average degree of {} ± {}.",
            p.ego_size,
            r3(p.ego_avg_degree),
            r3(p.ego_std_degree)
        )
    } else {
        "In its 1-hop ego network it has 0 neighbors.".to_string()
    };
    out.push((FeatureTag::Ego, ego));
    if cfg.include_tophub {
        let text = match p.hub_rank {
            Some(r) => format!(
                "This node is among the top {} primary hubs (hub rank {r}), and its structural role is {}.",
                cfg.hub_top_h, p.role
            ),
            None => format!(
                "This node is not among the top {} hubs, and its structural role is {}.",
                cfg.hub_top_h, p.role
            ),
        };
        out.push((FeatureTag::Hub, text));
    }
    let connectivity = if s.fiedler > 0.0 {
        "the graph is connected"
    } else {
        "the graph is disconnected"
    };
    out.push((
        FeatureTag::Fiedler,
        format!(
            "Spectral analysis of the whole graph gives a Fiedler value of {}, so {connectivity}.",
            r3(s.fiedler)
        ),
    ));
    out
}

fn profile_sentences(
    p: &StructProfile,
    s: &GraphSummary,
    cfg: &NarrationConfig,
) -> Vec<(FeatureTag, String)> {
    let grade = |pct: f64| {
        top_grade(pct)
            .map(|g| format!("top {g}%"))
            .unwrap_or_else(|| "none".to_string())
    };
    let mut out = Vec::with_capacity(10);
    out.push((
        FeatureTag::Identity,
        format!(
            "[NODE] id: {} | graph: undirected | nodes: {} | edges: {}",
            p.node_id, s.n, s.m
        ),
    ));
    if cfg.include_degree {
        out.push((
            FeatureTag::Degree,
            format!(
                "[DEGREE] degree: {} | percentile: {} | rank: {} | grade: {}",
                p.degree,
                r3(p.degree_percentile),
                p.degree_rank,
                grade(p.degree_percentile)
            ),
        ));
    }
    if cfg.include_triangles_clustering {
        out.push((
            FeatureTag::Triangles,
            format!("[TRIANGLES] count: {}", p.triangles),
        ));
        let level = if p.degree >= 2 {
            cohesion_label(p.clustering)
        } else {
            "undefined"
        };
        out.push((
            FeatureTag::Clustering,
            format!(
                "[CLUSTERING] coefficient: {} | cohesion: {level}",
                r3(p.clustering)
            ),
        ));
    }
    if cfg.include_kcore {
        out.push((FeatureTag::KCore, format!("[K-CORE] layer: {}", p.kcore)));
    }
    out.push((
        FeatureTag::Community,
        format!(
            "[COMMUNITY] id: {} | total: {}",
            p.community, s.num_communities
        ),
    ));
    if cfg.include_centrality {
        let [dp, cp, bp] = p.centrality_percentiles;
        out.push((
            FeatureTag::Centrality,
            format!(
                "[CENTRALITY] degree: {} ({}) | closeness: {} ({}) | betweenness: {} ({})",
                r3(p.degree_centrality),
                grade(dp),
                r3(p.closeness_centrality),
                grade(cp),
                r3(p.betweenness_centrality),
                grade(bp)
            ),
        ));
    }
    out.push((
        FeatureTag::Ego,
        format!(
            "[EGO NETWORK] neighbors: {} | mean degree: {} | std degree: {}",
            p.ego_size,
            r3(p.ego_avg_degree),
            r3(p.ego_std_degree)
        ),
    ));
    if cfg.include_tophub {
        let rank = p
            .hub_rank
            .map(|r| r.to_string())
            .unwrap_or_else(|| "none".to_string());
        out.push((
            FeatureTag::Hub,
            format!(
                "[HUB] rank: {rank} | top: {} | role: {}",
                cfg.hub_top_h, p.role
            ),
        ));
    }
    out.push((
        FeatureTag::Fiedler,
        format!("[SPECTRAL] fiedler: {}", r3(s.fiedler)),
    ));
    out
}

fn sentences_for(
    p: &StructProfile,
    s: &GraphSummary,
    cfg: &NarrationConfig,
) -> Vec<(FeatureTag, String)> {
    match cfg.style {
        Style::Narrative => narrative_sentences(p, s, cfg),
        Style::Profile => profile_sentences(p, s, cfg),
    }
}

/// Renders one node in canonical sentence order. Ignores `shuffle_seed`.
pub fn render_node(
    profile: &StructProfile,
    summary: &GraphSummary,
    config: &NarrationConfig,
) -> NodeNarrative {
    let sentences = sentences_for(profile, summary, config);
    NodeNarrative::assemble(profile.node_id, sentences, config.style.separator())
}

/// Renders every node in input order. With a shuffle seed, each node's
/// non-identity sentences are permuted by a stream keyed on
/// `(shuffle_seed, node_id)`.
pub fn render_corpus(
    profiles: &[StructProfile],
    summary: &GraphSummary,
    config: &NarrationConfig,
) -> Result<Vec<NodeNarrative>> {
    config.validate()?;
    Ok(profiles
        .iter()
        .map(|p| {
            let mut sentences = sentences_for(p, summary, config);
            if let Some(seed) = config.shuffle_seed {
                let mut rng = rng::stream(seed, p.node_id as u64, "narration-order");
                sentences[1..].shuffle(&mut rng);
            }
            NodeNarrative::assemble(p.node_id, sentences, config.style.separator())
        })
        .collect())
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('n') => out.push('\n'),
            Some('t') => out.push('\t'),
            Some('r') => out.push('\r'),
            Some(other) => out.push(other),
            None => out.push('\\'),
        }
    }
    out
}

/// `node_id<TAB>text` per line, with backslash escapes for newlines and tabs.
pub fn corpus_to_tsv(corpus: &[NodeNarrative]) -> String {
    let mut out = String::new();
    for nar in corpus {
        let _ = writeln!(out, "{}\t{}", nar.node_id, escape(&nar.text));
    }
    out
}

/// Reads back `(node_id, text)` pairs written by [`corpus_to_tsv`].
pub fn corpus_from_tsv(text: &str) -> Result<Vec<(i64, String)>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, line)| {
            let (id, body) = line
                .split_once('\t')
                .ok_or_else(|| Error::invalid(format!("corpus line {}: missing tab", i + 1)))?;
            let id = id
                .parse()
                .map_err(|_| Error::invalid(format!("corpus line {}: bad node id", i + 1)))?;
            Ok((id, unescape(body)))
        })
        .collect()
}

/// Human-readable dump: a header per node followed by one sentence per line.
pub fn corpus_dump(corpus: &[NodeNarrative]) -> String {
    let mut out = String::new();
    for nar in corpus {
        let _ = writeln!(out, "=== node {} ===", nar.node_id);
        for (tag, s) in nar.sentences() {
            let _ = writeln!(out, "  [{tag:?}] {s}");
        }
    }
    out
}
