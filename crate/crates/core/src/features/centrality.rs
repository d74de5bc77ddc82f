use std::collections::VecDeque;

use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq)]
pub struct Centralities {
    pub degree: Vec<f64>,
    pub closeness: Vec<f64>,
    pub betweenness: Vec<f64>,
}

struct Workspace {
    dist: Vec<i64>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
    preds: Vec<Vec<usize>>,
    order: Vec<usize>,
    queue: VecDeque<usize>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Workspace {
            dist: vec![-1; n],
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            preds: vec![Vec::new(); n],
            order: Vec::with_capacity(n),
            queue: VecDeque::with_capacity(n),
        }
    }

    /// One Brandes pass from `s`: BFS shortest-path counting, then dependency
    /// accumulation in reverse BFS order. Adds into `acc`.
    fn pass(&mut self, g: &Graph, s: usize, acc: &mut [f64]) -> f64 {
        let n = g.n();
        for v in 0..n {
            self.dist[v] = -1;
            self.sigma[v] = 0.0;
            self.delta[v] = 0.0;
            self.preds[v].clear();
        }
        self.order.clear();
        self.dist[s] = 0;
        self.sigma[s] = 1.0;
        self.queue.push_back(s);
        let mut dist_sum = 0i64;
        while let Some(v) = self.queue.pop_front() {
            self.order.push(v);
            dist_sum += self.dist[v];
            for &w in g.neighbors(v) {
                if self.dist[w] < 0 {
                    self.dist[w] = self.dist[v] + 1;
                    self.queue.push_back(w);
                }
                if self.dist[w] == self.dist[v] + 1 {
                    self.sigma[w] += self.sigma[v];
                    self.preds[w].push(v);
                }
            }
        }
        for &w in self.order.iter().rev() {
            let coeff = (1.0 + self.delta[w]) / self.sigma[w];
            for &v in &self.preds[w] {
                self.delta[v] += self.sigma[v] * coeff;
            }
            if w != s {
                acc[w] += self.delta[w];
            }
        }

        let reach = self.order.len();
        if reach <= 1 || n <= 1 {
            0.0
        } else {
            let r1 = (reach - 1) as f64;
            (r1 / dist_sum as f64) * (r1 / (n - 1) as f64)
        }
    }
}

/// Degree, closeness and betweenness centrality for every node.
///
/// Degree centrality is `deg / (n - 1)`. Closeness uses the component-scaled
/// form `((r - 1) / (n - 1)) * ((r - 1) / sum_dist)` with `r` the size of the
/// node's reachable set, 0 for isolated nodes. Betweenness is exact Brandes
/// accumulation over unweighted shortest paths, normalized by
/// `(n - 1)(n - 2) / 2`.
///
/// With `threads > 1` the sources are split into contiguous chunks whose
/// partial sums are reduced in chunk order; the result can then differ from
/// the single-threaded one in the last bits.
pub fn centralities(g: &Graph, threads: usize) -> Centralities {
    let n = g.n();
    let degree = (0..n)
        .map(|v| {
            if n > 1 {
                g.degree(v) as f64 / (n - 1) as f64
            } else {
                0.0
            }
        })
        .collect();

    let mut closeness = vec![0.0; n];
    let mut raw = vec![0.0; n];
    let threads = threads.max(1).min(n.max(1));
    if threads == 1 {
        let mut ws = Workspace::new(n);
        for (s, c) in closeness.iter_mut().enumerate() {
            *c = ws.pass(g, s, &mut raw);
        }
    } else {
        let chunk = n.div_ceil(threads);
        let partials: Vec<(std::ops::Range<usize>, Vec<f64>, Vec<f64>)> =
            std::thread::scope(|scope| {
                let handles: Vec<_> = (0..threads)
                    .map(|t| {
                        let range = (t * chunk).min(n)..((t + 1) * chunk).min(n);
                        scope.spawn(move || {
                            let mut ws = Workspace::new(n);
                            let mut dep = vec![0.0; n];
                            let clo: Vec<f64> =
                                range.clone().map(|s| ws.pass(g, s, &mut dep)).collect();
                            (range, dep, clo)
                        })
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().unwrap()).collect()
            });
        for (range, dep, clo) in partials {
            for (r, d) in raw.iter_mut().zip(dep) {
                *r += d;
            }
            for (s, c) in range.zip(clo) {
                closeness[s] = c;
            }
        }
    }

    // every unordered pair was counted from both endpoints
    let scale = if n > 2 {
        1.0 / ((n - 1) * (n - 2)) as f64
    } else {
        0.0
    };
    let betweenness = raw.iter().map(|b| b * scale).collect();
    Centralities {
        degree,
        closeness,
        betweenness,
    }
}
