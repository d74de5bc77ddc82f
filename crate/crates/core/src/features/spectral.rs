//! Algebraic connectivity via Lanczos on the normalized Laplacian.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng;

pub const FIEDLER_TOL: f64 = 1e-8;

/// `y = (I - D^{-1/2} A D^{-1/2}) x`, isolated nodes contributing rows of `I`.
fn apply_laplacian(g: &Graph, inv_sqrt: &[f64], x: &[f64], y: &mut [f64]) {
    for v in 0..g.n() {
        let mut acc = 0.0;
        for &u in g.neighbors(v) {
            acc += inv_sqrt[u] * x[u];
        }
        y[v] = x[v] - inv_sqrt[v] * acc;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn normalize(x: &mut [f64]) -> f64 {
    let norm = dot(x, x).sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
    norm
}

/// Two rounds of Gram-Schmidt against every vector in `basis`.
fn orthogonalize(x: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(x, q);
            axpy(-c, q, x);
        }
    }
}

/// Smallest eigenpair of the symmetric tridiagonal matrix (alpha, beta).
fn smallest_ritz(alpha: &[f64], beta: &[f64]) -> (f64, f64) {
    let k = alpha.len();
    let mut t = DMatrix::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let (idx, &theta) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty tridiagonal");
    (theta, eig.eigenvectors[(k - 1, idx)])
}

/// Second-smallest eigenvalue of the symmetric normalized Laplacian.
///
/// Returns 0 for disconnected graphs. For connected graphs the known null
/// vector `D^{1/2} 1` is deflated and Lanczos with full reorthogonalization
/// runs on its orthogonal complement until the Ritz residual of the smallest
/// Ritz value drops below [`FIEDLER_TOL`] or the Krylov space spans the
/// complement.
pub fn fiedler_value(g: &Graph) -> Result<f64> {
    let n = g.n();
    if n < 2 {
        return Err(Error::invalid(format!(
            "Fiedler value needs at least 2 nodes, got {n}"
        )));
    }
    if !g.is_connected() {
        return Ok(0.0);
    }
    let inv_sqrt: Vec<f64> = (0..n).map(|v| 1.0 / (g.degree(v) as f64).sqrt()).collect();

    let mut null: Vec<f64> = (0..n).map(|v| (g.degree(v) as f64).sqrt()).collect();
    normalize(&mut null);
    let mut basis: Vec<Vec<f64>> = vec![null];
    let dim = n - 1;

    let mut rng = rng::stream(0x5eed, n as u64, "lanczos");
    let mut fresh_start = |basis: &[Vec<f64>]| -> Option<Vec<f64>> {
        for _ in 0..8 {
            let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            orthogonalize(&mut v, basis);
            if normalize(&mut v) > 1e-8 {
                return Some(v);
            }
        }
        None
    };

    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut q = fresh_start(&basis).expect("complement is non-trivial");
    let mut w = vec![0.0; n];
    let mut last_theta = f64::NAN;
    loop {
        apply_laplacian(g, &inv_sqrt, &q, &mut w);
        let a = dot(&q, &w);
        alpha.push(a);
        basis.push(q.clone());
        orthogonalize(&mut w, &basis);
        let b = normalize(&mut w);
        let k = alpha.len();

        if k == dim {
            let (theta, _) = smallest_ritz(&alpha, &beta);
            return Ok(theta.clamp(0.0, 2.0));
        }
        if b < 1e-12 {
            // invariant subspace reached; restart in the remaining complement
            beta.push(0.0);
            match fresh_start(&basis) {
                Some(v) => q = v,
                None => {
                    let (theta, _) = smallest_ritz(&alpha, &beta[..k - 1]);
                    return Ok(theta.clamp(0.0, 2.0));
                }
            }
            continue;
        }
        if k < 32 || k.is_multiple_of(4) {
            let (theta, y_last) = smallest_ritz(&alpha, &beta);
            let residual = (b * y_last).abs();
            if residual < FIEDLER_TOL * 0.1 && (theta - last_theta).abs() < FIEDLER_TOL {
                return Ok(theta.clamp(0.0, 2.0));
            }
            last_theta = theta;
        }
        beta.push(b);
        q = w.clone();
    }
}
