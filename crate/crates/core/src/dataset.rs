//! Attributed graph datasets and their on-disk layout.
//!
//! A dataset is described by a TOML manifest:
//!
//! ```toml
//! name = "cora"
//! nodes = 2708                 # optional; checked against attribute rows
//! edges = "edges.txt"          # one "u v" pair per line, '#' comments
//! attributes = "attributes.csv" # one row per node, no header
//! labels = "labels.txt"        # optional, one 0/1 per line
//! node_ids = "node_ids.txt"    # optional, original id of each attribute row
//! directed = false             # optional; directed inputs are symmetrized
//! ```
//!
//! Relative paths resolve against the manifest's directory. Without a
//! `node_ids` file the edge list must use ids `0..n` where `n` is the number
//! of attribute rows.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub graph: Graph,
    pub attributes: Array2<f64>,
    pub labels: Option<Vec<u8>>,
    /// Original id of each dense node, in node order.
    pub original_ids: Vec<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Manifest {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    pub edges: PathBuf,
    pub attributes: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_ids: Option<PathBuf>,
    #[serde(default)]
    pub directed: bool,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        graph: Graph,
        attributes: Array2<f64>,
        labels: Option<Vec<u8>>,
    ) -> Result<Self> {
        let n = graph.n();
        let ds = Dataset {
            name: name.into(),
            original_ids: (0..n as i64).collect(),
            graph,
            attributes,
            labels,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.graph.n();
        if self.attributes.nrows() != n {
            return Err(Error::RowCountMismatch {
                what: "attribute matrix".into(),
                expected: n,
                found: self.attributes.nrows(),
            });
        }
        if let Some(labels) = &self.labels {
            if labels.len() != n {
                return Err(Error::RowCountMismatch {
                    what: "labels".into(),
                    expected: n,
                    found: labels.len(),
                });
            }
            if labels.iter().any(|&l| l > 1) {
                return Err(Error::invalid("labels must be 0 or 1"));
            }
        }
        if self.original_ids.len() != n {
            return Err(Error::RowCountMismatch {
                what: "node ids".into(),
                expected: n,
                found: self.original_ids.len(),
            });
        }
        if self.attributes.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("attribute matrix".into()));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn attribute_dim(&self) -> usize {
        self.attributes.ncols()
    }

    pub fn anomaly_count(&self) -> Option<usize> {
        self.labels
            .as_ref()
            .map(|l| l.iter().filter(|&&x| x == 1).count())
    }

    /// SHA-256 over the canonical serialized form (graph, attributes, labels).
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.n() as u64).to_le_bytes());
        for &(u, v) in self.graph.edges() {
            h.update((u as u64).to_le_bytes());
            h.update((v as u64).to_le_bytes());
        }
        h.update((self.attributes.ncols() as u64).to_le_bytes());
        for v in self.attributes.iter() {
            h.update(v.to_bits().to_le_bytes());
        }
        if let Some(labels) = &self.labels {
            h.update(labels);
        }
        let digest = h.finalize();
        let mut out = String::with_capacity(64);
        for b in digest.iter() {
            let _ = write!(out, "{b:02x}");
        }
        out
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

/// Parses a headerless numeric CSV; every row must have the same width.
pub fn read_matrix_csv(path: &Path) -> Result<Array2<f64>> {
    let text = read(path)?;
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut width = 0;
        for field in line.split(',') {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| parse_err(path, lineno + 1, format!("bad number {field:?}")))?;
            data.push(v);
            width += 1;
        }
        match cols {
            None => cols = Some(width),
            Some(c) if c != width => {
                return Err(parse_err(
                    path,
                    lineno + 1,
                    format!("row has {width} fields, expected {c}"),
                ))
            }
            _ => {}
        }
        rows += 1;
    }
    let cols = cols.unwrap_or(0);
    Array2::from_shape_vec((rows, cols), data).map_err(|e| Error::Shape(e.to_string()))
}

pub fn write_matrix_csv(path: &Path, m: &Array2<f64>) -> Result<()> {
    let mut out = String::new();
    for row in m.rows() {
        let mut first = true;
        for v in row.iter() {
            if !first {
                out.push(',');
            }
            first = false;
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn read_edge_list(path: &Path) -> Result<Vec<(i64, i64)>> {
    let text = read(path)?;
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let mut next = || -> Result<i64> {
            let tok = it
                .next()
                .ok_or_else(|| parse_err(path, lineno + 1, "expected two node ids"))?;
            tok.parse()
                .map_err(|_| parse_err(path, lineno + 1, format!("bad node id {tok:?}")))
        };
        let u = next()?;
        let v = next()?;
        edges.push((u, v));
    }
    Ok(edges)
}

fn read_lines_parsed<T: std::str::FromStr>(path: &Path) -> Result<Vec<T>> {
    let text = read(path)?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(
            line.parse()
                .map_err(|_| parse_err(path, lineno + 1, format!("bad value {line:?}")))?,
        );
    }
    Ok(out)
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let text = read(path)?;
    toml::from_str(&text).map_err(|e| parse_err(path, 0, e.to_string()))
}

/// Loads and validates a dataset from its manifest.
pub fn load_dataset(manifest_path: &Path) -> Result<Dataset> {
    let manifest = read_manifest(manifest_path)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));

    let attributes = read_matrix_csv(&resolve(base, &manifest.attributes))?;
    let n = attributes.nrows();
    if let Some(expected) = manifest.nodes {
        if expected != n {
            return Err(Error::RowCountMismatch {
                what: "attribute matrix".into(),
                expected,
                found: n,
            });
        }
    }

    let original_ids: Vec<i64> = match &manifest.node_ids {
        Some(p) => {
            let ids: Vec<i64> = read_lines_parsed(&resolve(base, p))?;
            if ids.len() != n {
                return Err(Error::RowCountMismatch {
                    what: "node id list".into(),
                    expected: n,
                    found: ids.len(),
                });
            }
            ids
        }
        None => (0..n as i64).collect(),
    };
    let index: HashMap<i64, usize> = original_ids
        .iter()
        .enumerate()
        .map(|(i, &id)| (id, i))
        .collect();
    if index.len() != n {
        return Err(Error::invalid("duplicate ids in node id list"));
    }

    let raw_edges = read_edge_list(&resolve(base, &manifest.edges))?;
    if manifest.directed {
        log::warn!(
            "dataset {}: directed edge list symmetrized to an undirected graph",
            manifest.name
        );
    }
    let mut edges = Vec::with_capacity(raw_edges.len());
    for (u, v) in raw_edges {
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        let map = |id: i64| {
            index
                .get(&id)
                .copied()
                .ok_or(Error::NodeOutOfRange { id, n })
        };
        edges.push((map(u)?, map(v)?));
    }
    let graph = Graph::new(n, edges)?;

    let labels = match &manifest.labels {
        Some(p) => Some(read_lines_parsed::<u8>(&resolve(base, p))?),
        None => None,
    };

    let ds = Dataset {
        name: manifest.name,
        graph,
        attributes,
        labels,
        original_ids,
    };
    ds.validate()?;
    Ok(ds)
}

/// Writes `ds` as a manifest plus data files into `dir`; returns the
/// manifest path.
pub fn save_dataset(ds: &Dataset, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let identity_ids = ds
        .original_ids
        .iter()
        .enumerate()
        .all(|(i, &id)| id == i as i64);

    let mut edges = String::new();
    for &(u, v) in ds.graph.edges() {
        let _ = writeln!(edges, "{} {}", ds.original_ids[u], ds.original_ids[v]);
    }
    let edges_path = dir.join("edges.txt");
    fs::write(&edges_path, edges).map_err(|e| Error::io(&edges_path, e))?;

    write_matrix_csv(&dir.join("attributes.csv"), &ds.attributes)?;

    let labels = match &ds.labels {
        Some(l) => {
            let p = dir.join("labels.txt");
            let body: String = l.iter().map(|x| format!("{x}\n")).collect();
            fs::write(&p, body).map_err(|e| Error::io(&p, e))?;
            Some(PathBuf::from("labels.txt"))
        }
        None => None,
    };

    let node_ids = if identity_ids {
        None
    } else {
        let p = dir.join("node_ids.txt");
        let body: String = ds.original_ids.iter().map(|x| format!("{x}\n")).collect();
        fs::write(&p, body).map_err(|e| Error::io(&p, e))?;
        Some(PathBuf::from("node_ids.txt"))
    };

    let manifest = Manifest {
        name: ds.name.clone(),
        nodes: Some(ds.n()),
        edges: "edges.txt".into(),
        attributes: "attributes.csv".into(),
        labels,
        node_ids,
        directed: false,
    };
    let path = dir.join("manifest.toml");
    let text = toml::to_string(&manifest).map_err(|e| Error::Config(e.to_string()))?;
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}
