use std::collections::BTreeMap;

use crate::graph::Graph;

pub const MAX_ROUNDS: usize = 100;

/// Synchronous label propagation.
///
/// Every node starts with its own id as label. In each round all nodes adopt,
/// simultaneously, the most frequent label over their closed neighborhood
/// (neighbors plus themselves), ties going to the smallest label. Stops at a
/// fixed point or after [`MAX_ROUNDS`]. Labels are finally renumbered
/// `0..k` in order of each community's smallest node id.
///
/// `seed` only fixes the initial assignment, which is the identity map, so
/// the output is the same for every seed.
pub fn communities(g: &Graph, seed: u64) -> Vec<usize> {
    let _ = seed;
    let n = g.n();
    let mut labels: Vec<usize> = (0..n).collect();
    let mut next = labels.clone();
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for _ in 0..MAX_ROUNDS {
        let mut changed = false;
        for v in 0..n {
            counts.clear();
            *counts.entry(labels[v]).or_default() += 1;
            for &u in g.neighbors(v) {
                *counts.entry(labels[u]).or_default() += 1;
            }
            // BTreeMap iterates labels ascending; keep the first maximum
            let mut best = (labels[v], 0);
            for (&label, &c) in &counts {
                if c > best.1 {
                    best = (label, c);
                }
            }
            next[v] = best.0;
            changed |= next[v] != labels[v];
        }
        std::mem::swap(&mut labels, &mut next);
        if !changed {
            break;
        }
    }
    compact(&labels)
}

fn compact(labels: &[usize]) -> Vec<usize> {
    let mut map: BTreeMap<usize, usize> = BTreeMap::new();
    labels
        .iter()
        .map(|l| {
            let k = map.len();
            *map.entry(*l).or_insert(k)
        })
        .collect()
}
