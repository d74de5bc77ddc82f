//! Ranking metrics and aggregation across seeds.

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_inputs(scores: &[f64], labels: &[u8]) -> Result<()> {
    if scores.len() != labels.len() {
        return Err(Error::RowCountMismatch {
            what: "labels".into(),
            expected: scores.len(),
            found: labels.len(),
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::NonFinite("scores".into()));
    }
    if labels.iter().any(|&l| l > 1) {
        return Err(Error::invalid("labels must be 0 or 1"));
    }
    Ok(())
}

/// Node indices by descending score, ties broken by ascending index.
pub fn ranking(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

/// Probability that a random positive outscores a random negative, ties
/// counting one half.
pub fn roc_auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    check_inputs(scores, labels)?;
    let pos = labels.iter().filter(|&&l| l == 1).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::invalid("ROC-AUC needs both positive and negative labels"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap_or(Ordering::Equal));
    // Count wins and ties in integers, walking groups of equal scores.
    let (mut wins, mut ties) = (0u64, 0u64);
    let mut neg_below = 0u64;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let group_pos = order[i..j].iter().filter(|&&k| labels[k] == 1).count() as u64;
        let group_neg = (j - i) as u64 - group_pos;
        wins += group_pos * neg_below;
        ties += group_pos * group_neg;
        neg_below += group_neg;
        i = j;
    }
    let pairs = (pos * neg) as f64;
    Ok((wins as f64 + 0.5 * ties as f64) / pairs)
}

/// Average precision: the mean over positives of precision at each
/// positive's rank.
pub fn pr_auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    check_inputs(scores, labels)?;
    let pos = labels.iter().filter(|&&l| l == 1).count();
    if pos == 0 {
        return Err(Error::invalid("PR-AUC needs at least one positive label"));
    }
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (rank, &i) in ranking(scores).iter().enumerate() {
        if labels[i] == 1 {
            hits += 1;
            sum += hits as f64 / (rank + 1) as f64;
        }
    }
    Ok(sum / pos as f64)
}

/// Fraction of positives among the `k` highest scores.
pub fn recall_at_k(scores: &[f64], labels: &[u8], k: usize) -> Result<f64> {
    check_inputs(scores, labels)?;
    if k == 0 || k > scores.len() {
        return Err(Error::invalid(format!("k = {k} out of range 1..={}", scores.len())));
    }
    let pos = labels.iter().filter(|&&l| l == 1).count();
    if pos == 0 {
        return Err(Error::invalid("recall needs at least one positive label"));
    }
    let found = ranking(scores)[..k].iter().filter(|&&i| labels[i] == 1).count();
    Ok(found as f64 / pos as f64)
}

/// Metrics of one scored run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedMetrics {
    pub seed: u64,
    pub roc_auc: f64,
    pub pr_auc: f64,
    /// Recall@K with K = number of positives.
    pub recall_at_k: f64,
}

/// ROC-AUC, PR-AUC, and Recall@K with K equal to the positive count.
pub fn evaluate(scores: &[f64], labels: &[u8], seed: u64) -> Result<SeedMetrics> {
    let k = labels.iter().filter(|&&l| l == 1).count();
    Ok(SeedMetrics {
        seed,
        roc_auc: roc_auc(scores, labels)?,
        pr_auc: pr_auc(scores, labels)?,
        recall_at_k: recall_at_k(scores, labels, k.max(1))?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Population variance.
    pub variance: f64,
    pub std: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len().max(1) as f64;
        let mean = values.iter().sum::<f64>() / n;
        let variance = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Summary {
            mean,
            variance,
            std: variance.sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub per_seed: Vec<SeedMetrics>,
    pub roc_auc: Summary,
    pub pr_auc: Summary,
    pub recall_at_k: Summary,
}

pub fn aggregate_seeds(per_seed: &[SeedMetrics]) -> Result<MetricReport> {
    if per_seed.is_empty() {
        return Err(Error::invalid("no per-seed metrics to aggregate"));
    }
    let col = |f: fn(&SeedMetrics) -> f64| Summary::of(&per_seed.iter().map(f).collect::<Vec<_>>());
    Ok(MetricReport {
        per_seed: per_seed.to_vec(),
        roc_auc: col(|m| m.roc_auc),
        pr_auc: col(|m| m.pr_auc),
        recall_at_k: col(|m| m.recall_at_k),
    })
}

impl MetricReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

pub const TABLE_HEADER: &str = "method,dataset,metric,mean,variance,std";

/// Flat `method,dataset,metric,mean,variance,std` rows; one block per report.
pub fn table_csv(rows: &[(String, String, MetricReport)]) -> String {
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    for (method, dataset, r) in rows {
        for (name, s) in [
            ("roc_auc", r.roc_auc),
            ("pr_auc", r.pr_auc),
            ("recall_at_k", r.recall_at_k),
        ] {
            writeln!(
                out,
                "{method},{dataset},{name},{},{},{}",
                s.mean, s.variance, s.std
            )
            .expect("write to string");
        }
    }
    out
}

/// Parsed `node_id,score[,label]` file.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    pub node_ids: Vec<i64>,
    pub scores: Vec<f64>,
    pub labels: Option<Vec<u8>>,
}

pub fn parse_scores_csv(text: &str, path: &std::path::Path) -> Result<ScoreTable> {
    let perr = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| perr(1, "empty file".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let with_labels = match cols.as_slice() {
        ["node_id", "score"] => false,
        ["node_id", "score", "label"] => true,
        _ => return Err(perr(1, format!("unexpected header {header:?}"))),
    };
    let mut t = ScoreTable {
        node_ids: Vec::new(),
        scores: Vec::new(),
        labels: with_labels.then(Vec::new),
    };
    for (i, line) in lines {
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != cols.len() {
            return Err(perr(i + 1, format!("expected {} fields, found {}", cols.len(), f.len())));
        }
        t.node_ids.push(f[0].parse().map_err(|e| perr(i + 1, format!("node id: {e}")))?);
        t.scores.push(f[1].parse().map_err(|e| perr(i + 1, format!("score: {e}")))?);
        if let Some(l) = &mut t.labels {
            l.push(f[2].parse().map_err(|e| perr(i + 1, format!("label: {e}")))?);
        }
    }
    Ok(t)
}

/// Points of the ROC curve `(fpr, tpr)`, one per distinct score threshold.
pub fn roc_curve(scores: &[f64], labels: &[u8]) -> Result<Vec<(f64, f64)>> {
    check_inputs(scores, labels)?;
    let pos = labels.iter().filter(|&&l| l == 1).count() as f64;
    let neg = labels.len() as f64 - pos;
    if pos == 0.0 || neg == 0.0 {
        return Err(Error::invalid("ROC curve needs both classes"));
    }
    let order = ranking(scores);
    let mut pts = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0.0, 0.0);
    for (r, &i) in order.iter().enumerate() {
        if labels[i] == 1 {
            tp += 1.0;
        } else {
            fp += 1.0;
        }
        let last_of_group = order.get(r + 1).is_none_or(|&j| scores[j] != scores[i]);
        if last_of_group {
            pts.push((fp / neg, tp / pos));
        }
    }
    Ok(pts)
}

/// Points of the precision-recall curve `(recall, precision)`, one per rank.
pub fn pr_curve(scores: &[f64], labels: &[u8]) -> Result<Vec<(f64, f64)>> {
    check_inputs(scores, labels)?;
    let pos = labels.iter().filter(|&&l| l == 1).count() as f64;
    if pos == 0.0 {
        return Err(Error::invalid("PR curve needs a positive label"));
    }
    let mut tp = 0.0;
    Ok(ranking(scores)
        .iter()
        .enumerate()
        .map(|(r, &i)| {
            if labels[i] == 1 {
                tp += 1.0;
            }
            (tp / pos, tp / (r + 1) as f64)
        })
        .collect())
}
