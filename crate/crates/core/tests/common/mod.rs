#![allow(dead_code)]

pub mod checks;
pub mod mock;
pub mod oracles;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tergad::model::{grad, loss, forward, Fusion, Gradients, Hyperparams, Mode, ModelInputs, ModelParams};
use tergad::Graph;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random connected graph: a spanning path plus extra random edges.
pub fn random_connected(n: usize, extra: usize, r: &mut ChaCha8Rng) -> Graph {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (r.gen_range(0..i), i)).collect();
    for _ in 0..extra {
        let u = r.gen_range(0..n);
        let v = r.gen_range(0..n);
        if u != v {
            edges.push((u, v));
        }
    }
    Graph::new(n, edges).unwrap()
}

pub fn random_matrix(rows: usize, cols: usize, r: &mut ChaCha8Rng) -> Array2<f64> {
    Array2::from_shape_simple_fn((rows, cols), || r.gen_range(-1.0..1.0))
}

/// n = 8, d_x = 5, d_z = 7 instance.
pub fn small_instance(seed: u64, semantic: bool) -> (ModelInputs, Graph) {
    let mut r = rng(seed);
    let g = random_connected(8, 6, &mut r);
    let x = random_matrix(8, 5, &mut r);
    let z = random_matrix(8, 7, &mut r);
    let inputs = if semantic {
        ModelInputs::new(&g, x.view(), Some(z.view()), x.view()).unwrap()
    } else {
        let x_in = ndarray::concatenate(ndarray::Axis(1), &[x.view(), z.view()]).unwrap();
        ModelInputs::new(&g, x_in.view(), None, x.view()).unwrap()
    };
    (inputs, g)
}

pub fn hyper(fusion: Fusion, layers: usize, semantic: bool, alpha: f64) -> Hyperparams {
    Hyperparams {
        hidden: 4,
        dropout: 0.0,
        fusion,
        layers,
        semantic_branch: semantic,
        alpha,
        ..Default::default()
    }
}

/// Params with random biases, query, and temperature so every code path
/// carries signal.
pub fn perturbed_params(inputs: &ModelInputs, h: &Hyperparams, seed: u64) -> ModelParams {
    let mut p = inputs.init_params(&Hyperparams { seed, ..h.clone() });
    let mut r = rng(seed ^ 0xABCD);
    p.b_g.mapv_inplace(|_| r.gen_range(-0.5..0.5));
    p.query.mapv_inplace(|_| r.gen_range(-1.0..1.0));
    p.tau[[0, 0]] = r.gen_range(0.5..2.0);
    p
}

pub fn total_loss(p: &ModelParams, inputs: &ModelInputs, h: &Hyperparams, mode: Mode) -> f64 {
    let st = forward(p, inputs, h, mode).unwrap();
    loss(&st, &inputs.a, &inputs.x, h.alpha).total
}

/// Checks `|a - f| <= 1e-8 || |a - f| / max(|a|, |f|) < 1e-4` for every
/// parameter entry. Returns the worst relative error among entries with
/// magnitude at least 1e-6, the failure count, and the entries checked.
pub fn check_gradients(p: &ModelParams, inputs: &ModelInputs, h: &Hyperparams, mode: Mode) -> (f64, usize, usize) {
    let (_, g): (_, Gradients) = grad(p, inputs, h, mode).unwrap();
    check_against(&g, p, inputs, h, mode)
}

pub fn check_against(
    g: &Gradients,
    p: &ModelParams,
    inputs: &ModelInputs,
    h: &Hyperparams,
    mode: Mode,
) -> (f64, usize, usize) {
    let step = 1e-5;
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    let mut checked = 0;
    let analytic = g.slots().map(|s| s.clone());
    for (slot, a_slot) in analytic.iter().enumerate() {
        for idx in 0..a_slot.len() {
            let mut plus = p.clone();
            let mut minus = p.clone();
            {
                let s = plus.slots_mut().into_iter().nth(slot).unwrap();
                s.as_slice_mut().unwrap()[idx] += step;
            }
            {
                let s = minus.slots_mut().into_iter().nth(slot).unwrap();
                s.as_slice_mut().unwrap()[idx] -= step;
            }
            let f = (total_loss(&plus, inputs, h, mode) - total_loss(&minus, inputs, h, mode)) / (2.0 * step);
            let a = a_slot.as_slice().unwrap()[idx];
            let diff = (a - f).abs();
            let scale = a.abs().max(f.abs());
            checked += 1;
            if scale >= 1e-6 {
                worst = worst.max(diff / scale);
            }
            if diff > 1e-8 && diff / scale >= 1e-4 {
                failures += 1;
            }
        }
    }
    (worst, failures, checked)
}

/// 60-node two-block run with local hash embeddings and short training.
pub fn toy_config(out: &std::path::Path) -> tergad::pipeline::RunConfig {
    use tergad::perturb::InjectionConfig;
    use tergad::pipeline::{ProviderConfig, RunConfig};
    use tergad::synth::SbmConfig;
    RunConfig {
        synthetic: SbmConfig {
            block_size: 30,
            p_in: 0.2,
            p_out: 0.02,
            dim: 16,
            seed: 7,
            ..Default::default()
        },
        injection: InjectionConfig::with_count(6, 0),
        provider: ProviderConfig::LocalHash { dim: 128, seed: 0 },
        model: Hyperparams {
            hidden: 16,
            epochs: 30,
            ..Default::default()
        },
        seeds: vec![0, 1],
        output_dir: out.to_path_buf(),
        ..Default::default()
    }
}
