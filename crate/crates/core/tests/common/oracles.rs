//! Brute-force reference implementations shared by the oracle tests and the
//! acceptance suite. Nothing here calls the code under test except the
//! `check_*` drivers.

use nalgebra::DMatrix;
use rand::Rng;
use tergad::features::{centralities, fiedler_value, kcore_numbers, triangles_and_clustering};
use tergad::metrics::{pr_auc, roc_auc};
use tergad::Graph;

use super::rng;

pub fn adjacency(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.n();
    let mut a = vec![vec![false; n]; n];
    for &(u, v) in g.edges() {
        a[u][v] = true;
        a[v][u] = true;
    }
    a
}

pub fn brute_degree(a: &[Vec<bool>]) -> Vec<usize> {
    a.iter().map(|r| r.iter().filter(|&&b| b).count()).collect()
}

/// Triangles through each node by checking every triple.
pub fn brute_triangles(a: &[Vec<bool>]) -> Vec<usize> {
    let n = a.len();
    let mut t = vec![0; n];
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if a[i][j] && a[j][k] && a[i][k] {
                    t[i] += 1;
                    t[j] += 1;
                    t[k] += 1;
                }
            }
        }
    }
    t
}

/// Edges among neighbours over possible neighbour pairs.
pub fn brute_clustering(a: &[Vec<bool>]) -> Vec<f64> {
    let n = a.len();
    (0..n)
        .map(|v| {
            let nb: Vec<usize> = (0..n).filter(|&u| a[v][u]).collect();
            let d = nb.len();
            if d < 2 {
                return 0.0;
            }
            let mut links = 0usize;
            for (i, &x) in nb.iter().enumerate() {
                for &y in &nb[i + 1..] {
                    if a[x][y] {
                        links += 1;
                    }
                }
            }
            2.0 * links as f64 / (d * (d - 1)) as f64
        })
        .collect()
}

/// Core number from the definition: the largest k whose k-core (obtained by
/// repeatedly deleting nodes of remaining degree < k) contains the node.
pub fn brute_kcore(a: &[Vec<bool>]) -> Vec<usize> {
    let n = a.len();
    let mut core = vec![0; n];
    for k in 1..=n {
        let mut alive = vec![true; n];
        loop {
            let mut changed = false;
            for v in 0..n {
                if alive[v] && (0..n).filter(|&u| alive[u] && a[v][u]).count() < k {
                    alive[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for v in 0..n {
            if alive[v] {
                core[v] = k;
            }
        }
    }
    core
}

/// All-pairs hop distances by Floyd-Warshall; `usize::MAX` if unreachable.
pub fn distances(a: &[Vec<bool>]) -> Vec<Vec<usize>> {
    let n = a.len();
    let inf = usize::MAX;
    let mut d = vec![vec![inf; n]; n];
    for i in 0..n {
        d[i][i] = 0;
        for j in 0..n {
            if a[i][j] {
                d[i][j] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] != inf && d[k][j] != inf && d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Wasserman-Faust closeness from the distance matrix.
pub fn brute_closeness(a: &[Vec<bool>]) -> Vec<f64> {
    let n = a.len();
    let d = distances(a);
    (0..n)
        .map(|v| {
            let reach: Vec<usize> = (0..n).filter(|&u| d[v][u] != usize::MAX).map(|u| d[v][u]).collect();
            let r = reach.len();
            if r <= 1 || n <= 1 {
                return 0.0;
            }
            let r1 = (r - 1) as f64;
            let total: usize = reach.iter().sum();
            (r1 / total as f64) * (r1 / (n - 1) as f64)
        })
        .collect()
}

/// Enumerates every shortest s-t path explicitly and counts, for each
/// interior node, the fraction of those paths through it. Normalized by
/// (n-1)(n-2)/2.
pub fn brute_betweenness(a: &[Vec<bool>]) -> Vec<f64> {
    let n = a.len();
    let d = distances(a);
    let mut bc = vec![0.0; n];
    fn walk(
        a: &[Vec<bool>],
        d: &[Vec<usize>],
        t: usize,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let v = *path.last().unwrap();
        if v == t {
            out.push(path.clone());
            return;
        }
        for w in 0..a.len() {
            if a[v][w] && d[w][t] != usize::MAX && d[w][t] + 1 == d[v][t] {
                path.push(w);
                walk(a, d, t, path, out);
                path.pop();
            }
        }
    }
    for s in 0..n {
        for t in s + 1..n {
            if d[s][t] == usize::MAX {
                continue;
            }
            let mut paths = Vec::new();
            walk(a, &d, t, &mut vec![s], &mut paths);
            let total = paths.len() as f64;
            for v in 0..n {
                if v == s || v == t {
                    continue;
                }
                let through = paths.iter().filter(|p| p.contains(&v)).count();
                bc[v] += through as f64 / total;
            }
        }
    }
    if n > 2 {
        let norm = ((n - 1) * (n - 2)) as f64 / 2.0;
        for b in &mut bc {
            *b /= norm;
        }
    }
    bc
}

/// Second-smallest eigenvalue of I - D^-1/2 A D^-1/2 by dense decomposition.
pub fn dense_fiedler(a: &[Vec<bool>]) -> f64 {
    let n = a.len();
    let deg = brute_degree(a);
    let l = DMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { 1.0 } else { 0.0 };
        let off = if a[i][j] {
            1.0 / ((deg[i] as f64).sqrt() * (deg[j] as f64).sqrt())
        } else {
            0.0
        };
        diag - off
    });
    let mut ev: Vec<f64> = l.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev[1]
}

/// Compares every graph feature of `g` with the brute-force oracles.
/// Returns a description of the first mismatch.
pub fn check_graph(g: &Graph) -> Result<(), String> {
    let a = adjacency(g);
    let n = g.n();
    let deg = brute_degree(&a);
    for v in 0..n {
        if g.degree(v) != deg[v] {
            return Err(format!("degree of {v}: {} vs {}", g.degree(v), deg[v]));
        }
    }
    let (tri, cc) = triangles_and_clustering(g);
    if tri != brute_triangles(&a) {
        return Err(format!("triangles {tri:?} vs {:?}", brute_triangles(&a)));
    }
    if cc != brute_clustering(&a) {
        return Err(format!("clustering {cc:?} vs {:?}", brute_clustering(&a)));
    }
    let core = kcore_numbers(g);
    if core != brute_kcore(&a) {
        return Err(format!("k-core {core:?} vs {:?}", brute_kcore(&a)));
    }
    let c = centralities(g, 1);
    let dc: Vec<f64> = deg
        .iter()
        .map(|&d| if n > 1 { d as f64 / (n - 1) as f64 } else { 0.0 })
        .collect();
    if c.degree != dc {
        return Err(format!("degree centrality {:?} vs {dc:?}", c.degree));
    }
    let clo = brute_closeness(&a);
    if c.closeness != clo {
        return Err(format!("closeness {:?} vs {clo:?}", c.closeness));
    }
    let bc = brute_betweenness(&a);
    for v in 0..n {
        if (c.betweenness[v] - bc[v]).abs() > 1e-10 {
            return Err(format!("betweenness of {v}: {} vs {}", c.betweenness[v], bc[v]));
        }
    }
    Ok(())
}

/// Every labelled graph on `n` nodes given by an edge bitmask, keeping the
/// connected ones.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    (0u64..1 << pairs.len())
        .filter_map(|mask| {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &e)| e);
            let g = Graph::new(n, edges).unwrap();
            g.is_connected().then_some(g)
        })
        .collect()
}

/// Random graphs with 1..=8 nodes and random density; may be disconnected.
pub fn random_graphs(count: usize, seed: u64) -> Vec<Graph> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let n = r.gen_range(1..=8);
            let p: f64 = r.gen_range(0.1..0.9);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if r.gen_bool(p) {
                        edges.push((i, j));
                    }
                }
            }
            Graph::new(n, edges).unwrap()
        })
        .collect()
}

/// Graph oracle sweep: all connected graphs with up to 6 nodes plus 100
/// random graphs with up to 8 nodes. Returns (graphs checked, failures).
pub fn graph_oracle_sweep() -> (usize, Vec<String>) {
    let mut graphs: Vec<Graph> = (1..=6).flat_map(connected_graphs).collect();
    graphs.extend(random_graphs(100, 2024));
    let failures = graphs
        .iter()
        .filter_map(|g| check_graph(g).err().map(|e| format!("{:?}: {e}", g.edges())))
        .collect();
    (graphs.len(), failures)
}

/// Lanczos Fiedler value vs dense eigendecomposition within 1e-8.
pub fn check_fiedler(g: &Graph) -> Result<(), String> {
    if g.n() < 2 {
        return Ok(());
    }
    let got = fiedler_value(g).map_err(|e| e.to_string())?;
    let want = if g.is_connected() { dense_fiedler(&adjacency(g)) } else { 0.0 };
    if (got - want).abs() > 1e-8 {
        return Err(format!("fiedler {got} vs {want}"));
    }
    Ok(())
}

/// Mann-Whitney statistic over every positive-negative pair.
pub fn pairwise_auc(scores: &[f64], labels: &[u8]) -> f64 {
    let mut num = 0.0;
    let mut pairs = 0usize;
    for (i, &li) in labels.iter().enumerate() {
        for (j, &lj) in labels.iter().enumerate() {
            if li == 1 && lj == 0 {
                pairs += 1;
                if scores[i] > scores[j] {
                    num += 1.0;
                } else if scores[i] == scores[j] {
                    num += 0.5;
                }
            }
        }
    }
    num / pairs as f64
}

/// 200 random instances with n <= 50, scores drawn from a small grid so
/// ties are common. Returns (max |error|, instances with ties).
pub fn roc_oracle_sweep(seed: u64) -> (f64, usize) {
    let mut r = rng(seed);
    let mut worst: f64 = 0.0;
    let mut tied = 0;
    let mut done = 0;
    while done < 200 {
        let n = r.gen_range(2..=50);
        let grid = r.gen_range(2..=20);
        let scores: Vec<f64> = (0..n).map(|_| r.gen_range(0..grid) as f64 / grid as f64).collect();
        let labels: Vec<u8> = (0..n).map(|_| r.gen_bool(0.3) as u8).collect();
        if labels.iter().all(|&l| l == 1) || labels.iter().all(|&l| l == 0) {
            continue;
        }
        let mut sorted = scores.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            tied += 1;
        }
        let got = roc_auc(&scores, &labels).unwrap();
        worst = worst.max((got - pairwise_auc(&scores, &labels)).abs());
        done += 1;
    }
    (worst, tied)
}

/// Ranked label strings with their average precision worked out by hand.
/// Each expression sums precision at the positives' ranks, in rank order,
/// and divides by the positive count.
#[allow(clippy::eq_op)]
pub fn ap_cases() -> Vec<(&'static str, f64)> {
    vec![
        ("1", 1.0),
        ("10", 1.0),
        ("01", (1.0 / 2.0) / 1.0),
        ("1100", (1.0 + 1.0) / 2.0),
        ("0011", (1.0 / 3.0 + 2.0 / 4.0) / 2.0),
        ("1010", (1.0 + 2.0 / 3.0) / 2.0),
        ("0101", (1.0 / 2.0 + 2.0 / 4.0) / 2.0),
        ("1001", (1.0 + 2.0 / 4.0) / 2.0),
        ("0110", (1.0 / 2.0 + 2.0 / 3.0) / 2.0),
        ("10001", (1.0 + 2.0 / 5.0) / 2.0),
        ("111", (1.0 + 1.0 + 1.0) / 3.0),
        ("0001", (1.0 / 4.0) / 1.0),
        ("010101", (1.0 / 2.0 + 2.0 / 4.0 + 3.0 / 6.0) / 3.0),
        ("110100", (1.0 + 1.0 + 3.0 / 4.0) / 3.0),
        ("001011", (1.0 / 3.0 + 2.0 / 5.0 + 3.0 / 6.0) / 3.0),
        ("1000000001", (1.0 + 2.0 / 10.0) / 2.0),
        ("01111", (1.0 / 2.0 + 2.0 / 3.0 + 3.0 / 4.0 + 4.0 / 5.0) / 4.0),
        ("10101010", (1.0 + 2.0 / 3.0 + 3.0 / 5.0 + 4.0 / 7.0) / 4.0),
        ("0000011111", (1.0 / 6.0 + 2.0 / 7.0 + 3.0 / 8.0 + 4.0 / 9.0 + 5.0 / 10.0) / 5.0),
        ("1101001000", (1.0 + 1.0 + 3.0 / 4.0 + 4.0 / 7.0) / 4.0),
    ]
}

/// Runs every AP case with scores assigned so the ranking reproduces the
/// string, after scattering the nodes with a fixed permutation. Returns the
/// mismatches.
pub fn check_ap_cases() -> Vec<String> {
    let mut bad = Vec::new();
    for (ranked, want) in ap_cases() {
        let n = ranked.len();
        // position p in the ranking is stored at index (p * 3 + 1) % n when
        // that is a permutation, else reversed
        let slot: Vec<usize> = if gcd(3, n) == 1 {
            (0..n).map(|p| (p * 3 + 1) % n).collect()
        } else {
            (0..n).rev().collect()
        };
        let mut scores = vec![0.0; n];
        let mut labels = vec![0u8; n];
        for (p, c) in ranked.chars().enumerate() {
            scores[slot[p]] = (n - p) as f64;
            labels[slot[p]] = (c == '1') as u8;
        }
        let got = pr_auc(&scores, &labels).unwrap();
        if got != want {
            bad.push(format!("{ranked}: {got} vs {want}"));
        }
    }
    bad
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}
