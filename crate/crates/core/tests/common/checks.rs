//! Property checks shared by the integration tests and the acceptance suite.
//! Each returns the list of violations found.

use ndarray::Array2;
use rand::Rng;
use tergad::embed::zscore_columns;
use tergad::model::{forward, loss, score, train, Fusion, Hyperparams, Mode, ModelInputs};
use tergad::perturb::{InjectionConfig, InjectionReport};
use tergad::Dataset;

use super::{random_connected, random_matrix, rng};

/// Trains a small gated model on a random instance and checks the scoring
/// identity and the shape invariants of the reconstruction.
pub fn formula_fidelity(seed: u64) -> Vec<String> {
    let mut bad = Vec::new();
    let mut r = rng(seed);
    let n = r.gen_range(10..30);
    let g = random_connected(n, n, &mut r);
    let x = random_matrix(n, 6, &mut r);
    let z = random_matrix(n, 9, &mut r);
    let inputs = ModelInputs::new(&g, x.view(), Some(z.view()), x.view()).unwrap();
    let hyper = Hyperparams {
        hidden: 8,
        epochs: 25,
        alpha: r.gen_range(0.1..0.9),
        seed,
        ..Default::default()
    };
    let params = train(&inputs, &hyper).unwrap().params;

    let st = forward(&params, &inputs, &hyper, Mode::Eval).unwrap();
    let parts = loss(&st, &inputs.a, &inputs.x, hyper.alpha);
    let s = score(&params, &inputs, &hyper, hyper.alpha).unwrap();
    let lhs = s.scores.sum();
    let rhs = (1.0 - hyper.alpha) * parts.structural + hyper.alpha * parts.attribute;
    if (lhs - rhs).abs() > 1e-9 {
        bad.push(format!("seed {seed}: score sum {lhs} vs weighted losses {rhs}"));
    }

    let a = &st.a_hat;
    for i in 0..n {
        if a[[i, i]] < 0.5 {
            bad.push(format!("seed {seed}: diag Â[{i}] = {}", a[[i, i]]));
        }
        for j in 0..i {
            if a[[i, j]] != a[[j, i]] {
                bad.push(format!("seed {seed}: Â not symmetric at ({i},{j})"));
            }
        }
    }
    let gate = st.gate.as_ref().expect("gate fusion");
    if gate.iter().any(|&v| !(v > 0.0 && v < 1.0)) {
        bad.push(format!("seed {seed}: gate outside (0,1)"));
    }
    // Gate output lies between the branch activations.
    for ((&f, &hx), &hz) in st.h_fused.iter().zip(&st.h_x).zip(&st.h_z) {
        let (lo, hi) = (hx.min(hz), hx.max(hz));
        if f < lo - 1e-12 || f > hi + 1e-12 {
            bad.push(format!("seed {seed}: fused {f} outside [{lo}, {hi}]"));
            break;
        }
    }
    bad
}

/// Z-score post-conditions on a random matrix with one constant column.
pub fn zscore_postconditions(seed: u64) -> Vec<String> {
    let mut r = rng(seed);
    let rows = r.gen_range(2..200);
    let cols = r.gen_range(1..20);
    let scale: f64 = r.gen_range(0.01..1000.0);
    let mut m = Array2::from_shape_simple_fn((rows, cols), || r.gen_range(-1.0..1.0) * scale + 3.0 * scale);
    m.column_mut(0).fill(7.5);
    let z = zscore_columns(&m).unwrap();
    let mut bad = Vec::new();
    for j in 1..cols {
        let col = z.column(j);
        let mean = col.mean().unwrap();
        let std = col.var(0.0).sqrt();
        let constant = m.column(j).iter().all(|&v| v == m[[0, j]]);
        if constant {
            continue;
        }
        if mean.abs() >= 1e-6 || (std - 1.0).abs() >= 1e-6 {
            bad.push(format!("seed {seed} col {j}: mean {mean:e}, std {std}"));
        }
    }
    if z.column(0).iter().any(|&v| v != 0.0) {
        bad.push(format!("seed {seed}: constant column not mapped to 0"));
    }
    bad
}

/// Every exactness property of one injection.
pub fn injection_exactness(
    base: &Dataset,
    comm: &[usize],
    cfg: &InjectionConfig,
    perturbed: &Dataset,
    report: &InjectionReport,
) -> Vec<String> {
    let mut bad = Vec::new();
    let n = base.n();
    let want = cfg.count_for(n);
    let labels = perturbed.labels.as_ref().expect("labels");
    let positives = labels.iter().filter(|&&l| l == 1).count();
    if report.anomalous_nodes.len() != want || positives != want {
        bad.push(format!("{} anomalies ({positives} labelled), wanted {want}", report.anomalous_nodes.len()));
    }
    let d = base.attribute_dim();
    let flips = (cfg.flip_fraction * d as f64).floor() as usize;
    for node in &report.nodes {
        let v = node.node;
        let mut dims = node.flipped_dims.clone();
        dims.dedup();
        if dims.len() != flips {
            bad.push(format!("node {v}: {} flipped dims, wanted {flips}", dims.len()));
        }
        let changed = (0..d)
            .filter(|&j| base.attributes[[v, j]] != perturbed.attributes[[v, j]])
            .count();
        if changed != flips {
            bad.push(format!("node {v}: {changed} attribute values changed, wanted {flips}"));
        }
        let k = (cfg.rewire_fraction * base.graph.degree(v) as f64).floor() as usize;
        if node.removed.len() != k || node.added.len() != k {
            bad.push(format!(
                "node {v} (degree {}): removed {}, added {}, wanted {k} (skipped {})",
                base.graph.degree(v),
                node.removed.len(),
                node.added.len(),
                node.skipped
            ));
        }
        for &(a, b) in &node.added {
            if comm[a] == comm[b] {
                bad.push(format!("added edge ({a},{b}) inside community {}", comm[a]));
            }
        }
    }
    let g = &perturbed.graph;
    for v in 0..n {
        let nb = g.neighbors(v);
        if nb.contains(&v) {
            bad.push(format!("self-loop at {v}"));
        }
        if nb.windows(2).any(|w| w[0] >= w[1]) {
            bad.push(format!("duplicate neighbours at {v}"));
        }
        for &u in nb {
            if !g.neighbors(u).contains(&v) {
                bad.push(format!("edge ({v},{u}) has no reverse"));
            }
        }
    }
    if g.edges().len() != g.m() || 2 * g.m() != (0..n).map(|v| g.degree(v)).sum::<usize>() {
        bad.push("edge count inconsistent with degrees".into());
    }
    // Non-anomalous nodes keep their attributes.
    for v in 0..n {
        if labels[v] == 0 && base.attributes.row(v) != perturbed.attributes.row(v) {
            bad.push(format!("normal node {v} changed attributes"));
        }
    }
    bad
}

/// Every fusion strategy evaluated, for tests that sweep them.
pub fn fusions() -> [Fusion; 6] {
    Fusion::ALL
}
