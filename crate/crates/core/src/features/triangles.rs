use crate::graph::Graph;

/// Per-node triangle counts and local clustering coefficients.
///
/// Clustering is `2 t / (d (d - 1))`, and 0 when `d < 2`.
pub fn triangles_and_clustering(g: &Graph) -> (Vec<usize>, Vec<f64>) {
    let n = g.n();
    let mut tri = vec![0usize; n];
    for &(u, v) in g.edges() {
        // common neighbors w > v, so each triangle u < v < w is seen once
        let (a, b) = (g.neighbors(u), g.neighbors(v));
        let (mut i, mut j) = (a.partition_point(|&x| x <= v), b.partition_point(|&x| x <= v));
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    let w = a[i];
                    tri[u] += 1;
                    tri[v] += 1;
                    tri[w] += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    let clustering = (0..n)
        .map(|v| {
            let d = g.degree(v);
            if d < 2 {
                0.0
            } else {
                2.0 * tri[v] as f64 / (d * (d - 1)) as f64
            }
        })
        .collect();
    (tri, clustering)
}
