//! Simple undirected graphs and the self-loop normalized adjacency.

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};

/// Undirected simple graph on dense node ids `0..n`.
///
/// Edges are stored once as `(u, v)` with `u < v`, sorted. Adjacency lists
/// are sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph, deduplicating repeated edges in either orientation.
    ///
    /// Self-loops and ids `>= n` are rejected.
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut canon = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::NodeOutOfRange {
                    id: u.max(v) as i64,
                    n,
                });
            }
            if u == v {
                return Err(Error::SelfLoop(u as i64));
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        canon.dedup();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &canon {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph {
            n,
            edges: canon,
            adj,
        })
    }

    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Number of incident edges per node.
    pub fn degree_vector(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    /// Symmetric 0/1 adjacency matrix.
    pub fn dense_adjacency(&self) -> Array2<f64> {
        let mut a = Array2::zeros((self.n, self.n));
        for &(u, v) in &self.edges {
            a[[u, v]] = 1.0;
            a[[v, u]] = 1.0;
        }
        a
    }

    /// Connected component id per node, numbered in order of smallest member.
    pub fn components(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut stack = Vec::new();
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &w in &self.adj[u] {
                    if comp[w] == usize::MAX {
                        comp[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().iter().all(|&c| c == 0)
    }
}

/// `D^{-1/2} (A + I) D^{-1/2}` with `D` the degree matrix of `A + I`,
/// held in compressed sparse row form.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedAdjacency {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

/// Self-loop normalized adjacency of `g`.
pub fn normalize_adjacency(g: &Graph) -> NormalizedAdjacency {
    let n = g.n();
    let inv_sqrt: Vec<f64> = (0..n)
        .map(|v| 1.0 / ((g.degree(v) + 1) as f64).sqrt())
        .collect();
    let mut indptr = Vec::with_capacity(n + 1);
    let mut indices = Vec::with_capacity(n + 2 * g.m());
    let mut values = Vec::with_capacity(n + 2 * g.m());
    indptr.push(0);
    for i in 0..n {
        // neighbors are sorted; splice the diagonal in at its position
        let mut placed = false;
        for &j in g.neighbors(i) {
            if !placed && j > i {
                indices.push(i);
                values.push(inv_sqrt[i] * inv_sqrt[i]);
                placed = true;
            }
            indices.push(j);
            values.push(inv_sqrt[i] * inv_sqrt[j]);
        }
        if !placed {
            indices.push(i);
            values.push(inv_sqrt[i] * inv_sqrt[i]);
        }
        indptr.push(indices.len());
    }
    NormalizedAdjacency {
        n,
        indptr,
        indices,
        values,
    }
}

impl NormalizedAdjacency {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let row = &self.indices[self.indptr[i]..self.indptr[i + 1]];
        match row.binary_search(&j) {
            Ok(k) => self.values[self.indptr[i] + k],
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut out = Array2::zeros((self.n, self.n));
        for i in 0..self.n {
            for k in self.indptr[i]..self.indptr[i + 1] {
                out[[i, self.indices[k]]] = self.values[k];
            }
        }
        out
    }

    /// Sparse-dense product `self · rhs`.
    pub fn dot(&self, rhs: &ArrayView2<f64>) -> Array2<f64> {
        assert_eq!(rhs.nrows(), self.n, "normalized adjacency product shape");
        let mut out = Array2::zeros((self.n, rhs.ncols()));
        for i in 0..self.n {
            let mut row = out.row_mut(i);
            for k in self.indptr[i]..self.indptr[i + 1] {
                row.scaled_add(self.values[k], &rhs.row(self.indices[k]));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn path(n: usize) -> Graph {
        Graph::new(n, (0..n - 1).map(|i| (i, i + 1))).unwrap()
    }

    #[test]
    fn rejects_self_loops_and_out_of_range() {
        assert!(matches!(Graph::new(2, [(1, 1)]), Err(Error::SelfLoop(1))));
        assert!(matches!(
            Graph::new(2, [(0, 2)]),
            Err(Error::NodeOutOfRange { id: 2, n: 2 })
        ));
    }

    #[test]
    fn deduplicates_both_orientations() {
        let g = Graph::new(3, [(0, 1), (1, 0), (0, 1), (2, 1)]).unwrap();
        assert_eq!(g.m(), 2);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn degree_vector_examples() {
        assert_eq!(Graph::empty(1).degree_vector(), vec![0]);
        let star = Graph::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(star.degree_vector()[0], 3);
        assert_eq!(path(4).degree_vector(), vec![1, 2, 2, 1]);
    }

    #[test]
    fn normalized_adjacency_small_cases() {
        assert_eq!(normalize_adjacency(&Graph::empty(1)).to_dense()[[0, 0]], 1.0);

        let k2 = normalize_adjacency(&Graph::new(2, [(0, 1)]).unwrap()).to_dense();
        for v in k2.iter() {
            assert!((v - 0.5).abs() < 1e-15);
        }

        let k3 = normalize_adjacency(&Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap()).to_dense();
        for v in k3.iter() {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (1usize..12).prop_flat_map(|n| {
            proptest::collection::vec((0..n, 0..n), 0..30).prop_map(move |pairs| {
                Graph::new(n, pairs.into_iter().filter(|(u, v)| u != v)).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn normalized_adjacency_invariants(g in arb_graph()) {
            let a = normalize_adjacency(&g).to_dense();
            let n = g.n();
            let sqrt_d: Vec<f64> = (0..n).map(|v| ((g.degree(v) + 1) as f64).sqrt()).collect();
            for i in 0..n {
                let mut acc = 0.0;
                for j in 0..n {
                    prop_assert!((a[[i, j]] - a[[j, i]]).abs() < 1e-12);
                    prop_assert!((0.0..=1.0).contains(&a[[i, j]]));
                    acc += a[[i, j]] * sqrt_d[j];
                }
                prop_assert!((acc - sqrt_d[i]).abs() < 1e-10);
            }
        }

        #[test]
        fn sparse_product_matches_dense(g in arb_graph(), seed in 0u64..1000) {
            let n = g.n();
            let x = Array2::from_shape_fn((n, 3), |(i, j)| ((i * 7 + j * 3) as u64 ^ seed) as f64 % 5.0 - 2.0);
            let adj = normalize_adjacency(&g);
            let sparse = adj.dot(&x.view());
            let dense = adj.to_dense().dot(&x);
            for (s, d) in sparse.iter().zip(dense.iter()) {
                prop_assert!((s - d).abs() < 1e-12);
            }
        }
    }
}
