use ndarray::{concatenate, s, Array1, Array2, ArrayView2, Axis, Zip};
use rand::Rng;

use super::{Fusion, Gradients, Hyperparams, ModelInputs, ModelParams};
use crate::error::{Error, Result};
use crate::graph::NormalizedAdjacency;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Eval,
    /// Dropout masks drawn from a stream keyed by `(seed, step)`.
    Train { seed: u64, step: u64 },
}

/// Inverted-dropout masks: entries are 0 or `1 / (1 - p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DropoutMasks {
    pub h_x: Array2<f64>,
    pub h_z: Array2<f64>,
    pub z: Array2<f64>,
}

impl DropoutMasks {
    pub fn sample(n: usize, h: usize, semantic: bool, p: f64, seed: u64, step: u64) -> Self {
        let mut rng = rng::stream(seed, step, "dropout");
        let keep = 1.0 / (1.0 - p);
        let mut draw = |cols: usize| {
            Array2::from_shape_simple_fn((n, cols), || {
                if rng.gen::<f64>() < p {
                    0.0
                } else {
                    keep
                }
            })
        };
        let h_x = draw(h);
        let h_z = draw(if semantic { h } else { 0 });
        let z = draw(h);
        DropoutMasks { h_x, h_z, z }
    }
}

/// Output of a fusion strategy plus what its backward pass needs.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionOutput {
    pub fused: Array2<f64>,
    /// Sigmoid gate, gate fusion only.
    pub gate: Option<Array2<f64>>,
    /// Per-node branch weights `(β_x, β_z)` as an `n x 2` matrix,
    /// attention strategies only.
    pub weights: Option<Array2<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForwardState {
    /// Branch activations after dropout.
    pub h_x: Array2<f64>,
    pub h_z: Array2<f64>,
    pub gate: Option<Array2<f64>>,
    pub attention: Option<Array2<f64>>,
    pub h_fused: Array2<f64>,
    /// Latent after dropout.
    pub z: Array2<f64>,
    pub x_hat: Array2<f64>,
    pub a_hat: Array2<f64>,
}

/// Intermediate values kept for the backward pass.
struct Cache {
    // attribute branch
    v1_x: Option<Array2<f64>>,
    p1_x: Option<Array2<f64>>,
    v_x: Array2<f64>,
    // semantic branch
    v1_z: Option<Array2<f64>>,
    p1_z: Option<Array2<f64>>,
    v_z: Option<Array2<f64>>,
    q_fused: Array2<f64>,
    u: Array2<f64>,
    p_dec: Array2<f64>,
    masks: Option<DropoutMasks>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossParts {
    /// `(1 - α) L_struct / n + α L_attr / n`.
    pub total: f64,
    /// `‖A - Â‖_F²`.
    pub structural: f64,
    /// `‖X - X̂‖_F²`.
    pub attribute: f64,
}

fn relu(m: &Array2<f64>) -> Array2<f64> {
    m.mapv(|v| v.max(0.0))
}

fn sigmoid(v: f64) -> f64 {
    if v >= 0.0 {
        1.0 / (1.0 + (-v).exp())
    } else {
        let e = v.exp();
        e / (1.0 + e)
    }
}

/// Copies the strict upper triangle of a square row-major buffer onto the
/// lower one, tile by tile.
fn mirror_upper(m: &mut [f64], n: usize) {
    const TILE: usize = 64;
    for bi in (0..n).step_by(TILE) {
        for bj in (bi..n).step_by(TILE) {
            for i in bi..(bi + TILE).min(n) {
                for j in bj.max(i + 1)..(bj + TILE).min(n) {
                    m[j * n + i] = m[i * n + j];
                }
            }
        }
    }
}

/// Elementwise sigmoid of a symmetric matrix, evaluated on the upper
/// triangle only.
fn symmetric_sigmoid(m: &mut Array2<f64>) {
    let n = m.nrows();
    let buf = m.as_slice_mut().expect("standard layout");
    for i in 0..n {
        for v in &mut buf[i * n + i..(i + 1) * n] {
            *v = sigmoid(*v);
        }
    }
    mirror_upper(buf, n);
}

/// `c · (Â - A) ⊙ Â ⊙ (1 - Â)` for symmetric `Â` and `A`.
fn structural_delta(a_hat: &Array2<f64>, a: &Array2<f64>, c: f64) -> Array2<f64> {
    let n = a_hat.nrows();
    let mut d = Array2::zeros((n, n));
    let (p, t) = (a_hat.as_slice().expect("standard layout"), a.as_slice().expect("standard layout"));
    let out = d.as_slice_mut().expect("fresh array");
    for i in 0..n {
        let r = i * n + i..(i + 1) * n;
        for ((o, &p), &t) in out[r.clone()].iter_mut().zip(&p[r.clone()]).zip(&t[r]) {
            *o = c * (p - t) * p * (1.0 - p);
        }
    }
    mirror_upper(out, n);
    d
}

fn relu_backward(grad: &mut Array2<f64>, pre: &Array2<f64>) {
    Zip::from(grad).and(pre).for_each(|g, &p| {
        if p <= 0.0 {
            *g = 0.0;
        }
    });
}

/// Combines the two branch activations with `strategy`.
pub fn fuse(
    strategy: Fusion,
    h_x: &ArrayView2<f64>,
    h_z: &ArrayView2<f64>,
    params: &ModelParams,
) -> Result<FusionOutput> {
    if h_x.dim() != h_z.dim() {
        return Err(Error::Shape(format!(
            "fusion inputs differ: {:?} vs {:?}",
            h_x.dim(),
            h_z.dim()
        )));
    }
    let h = h_x.ncols();
    let out = match strategy {
        Fusion::Gate => {
            let cat = concatenate(Axis(1), &[h_x.view(), h_z.view()])
                .map_err(|e| Error::Shape(e.to_string()))?;
            let mut g = cat.dot(&params.w_g);
            g += &params.b_g.row(0);
            g.mapv_inplace(sigmoid);
            let mut fused = Array2::zeros((h_x.nrows(), h));
            Zip::from(&mut fused)
                .and(&g)
                .and(h_x)
                .and(h_z)
                .for_each(|f, &gv, &x, &z| *f = gv * x + (1.0 - gv) * z);
            FusionOutput {
                fused,
                gate: Some(g),
                weights: None,
            }
        }
        Fusion::Concat => {
            let cat = concatenate(Axis(1), &[h_x.view(), h_z.view()])
                .map_err(|e| Error::Shape(e.to_string()))?;
            let mut fused = cat.dot(&params.w_g);
            fused += &params.b_g.row(0);
            FusionOutput {
                fused,
                gate: None,
                weights: None,
            }
        }
        Fusion::Add => FusionOutput {
            fused: h_x + h_z,
            gate: None,
            weights: None,
        },
        Fusion::Multiply => FusionOutput {
            fused: h_x * h_z,
            gate: None,
            weights: None,
        },
        Fusion::Attention | Fusion::TempAttention => {
            let tau = if strategy == Fusion::TempAttention {
                params.tau[[0, 0]]
            } else {
                1.0
            };
            if tau.is_nan() || tau <= 0.0 {
                return Err(Error::invalid(format!("attention temperature {tau} must be positive")));
            }
            let q = params.query.row(0);
            let sx = h_x.dot(&q);
            let sz = h_z.dot(&q);
            let n = h_x.nrows();
            let mut weights = Array2::zeros((n, 2));
            let mut fused = Array2::zeros((n, h));
            for i in 0..n {
                let bx = sigmoid((sx[i] - sz[i]) / tau);
                weights[[i, 0]] = bx;
                weights[[i, 1]] = 1.0 - bx;
                let mut row = fused.row_mut(i);
                row.scaled_add(bx, &h_x.row(i));
                row.scaled_add(1.0 - bx, &h_z.row(i));
            }
            FusionOutput {
                fused,
                gate: None,
                weights: Some(weights),
            }
        }
    };
    Ok(out)
}

struct Branch {
    v1: Option<Array2<f64>>,
    p1: Option<Array2<f64>>,
    v: Array2<f64>,
    h: Array2<f64>,
}

fn branch_forward(
    adj: &NormalizedAdjacency,
    propagated: &Array2<f64>,
    w1: &Array2<f64>,
    w2: &Array2<f64>,
    two_layer: bool,
) -> Branch {
    let v1 = propagated.dot(w1);
    if two_layer {
        let h1 = relu(&v1);
        let p1 = adj.dot(&h1.view());
        let v = p1.dot(w2);
        Branch {
            h: relu(&v),
            v1: Some(v1),
            p1: Some(p1),
            v,
        }
    } else {
        Branch {
            h: relu(&v1),
            v1: None,
            p1: None,
            v: v1,
        }
    }
}

fn check_shapes(params: &ModelParams, inputs: &ModelInputs, hyper: &Hyperparams) -> Result<()> {
    let h = params.hidden();
    let shape = |what: &str, got: (usize, usize), want: (usize, usize)| {
        if got != want {
            Err(Error::Shape(format!("{what}: expected {want:?}, got {got:?}")))
        } else {
            Ok(())
        }
    };
    shape("w_x", params.w_x.dim(), (inputs.ax.ncols(), h))?;
    shape("w_dec", params.w_dec.dim(), (h, inputs.x.ncols()))?;
    shape("w_g", params.w_g.dim(), (2 * h, h))?;
    if hyper.semantic_branch {
        let d_z = inputs
            .az
            .as_ref()
            .ok_or_else(|| Error::Shape("semantic branch enabled without embeddings".into()))?
            .ncols();
        shape("w_z", params.w_z.dim(), (d_z, h))?;
    }
    if params.layers != hyper.layers {
        return Err(Error::Shape(format!(
            "parameters built for {} layers, hyperparameters ask for {}",
            params.layers, hyper.layers
        )));
    }
    Ok(())
}

fn forward_cached(
    params: &ModelParams,
    inputs: &ModelInputs,
    hyper: &Hyperparams,
    mode: Mode,
) -> Result<(ForwardState, Cache, Option<FusionOutput>)> {
    check_shapes(params, inputs, hyper)?;
    let n = inputs.n();
    let h = params.hidden();
    let two_layer = params.layers == 2;
    let semantic = hyper.semantic_branch;
    let masks = match mode {
        Mode::Eval => None,
        Mode::Train { seed, step } if hyper.dropout > 0.0 => Some(DropoutMasks::sample(
            n,
            h,
            semantic,
            hyper.dropout,
            seed,
            step,
        )),
        Mode::Train { .. } => None,
    };

    let bx = branch_forward(&inputs.adj, &inputs.ax, &params.w_x, &params.w_x2, two_layer);
    let mut h_x = bx.h;
    if let Some(m) = &masks {
        h_x *= &m.h_x;
    }

    let (bz, h_z) = if semantic {
        let az = inputs.az.as_ref().expect("checked");
        let b = branch_forward(&inputs.adj, az, &params.w_z, &params.w_z2, two_layer);
        let mut hz = b.h.clone();
        if let Some(m) = &masks {
            hz *= &m.h_z;
        }
        (Some(b), hz)
    } else {
        (None, Array2::zeros((n, 0)))
    };

    let fusion = if semantic {
        Some(fuse(params.fusion, &h_x.view(), &h_z.view(), params)?)
    } else {
        None
    };
    let h_fused = fusion
        .as_ref()
        .map(|f| f.fused.clone())
        .unwrap_or_else(|| h_x.clone());

    let q_fused = inputs.adj.dot(&h_fused.view());
    let u = q_fused.dot(&params.w_fuse);
    let mut z = relu(&u);
    if let Some(m) = &masks {
        z *= &m.z;
    }
    let p_dec = inputs.adj.dot(&z.view());
    let x_hat = p_dec.dot(&params.w_dec);
    let mut a_hat = z.dot(&z.t());
    symmetric_sigmoid(&mut a_hat);

    if x_hat.iter().any(|v| !v.is_finite()) || z.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("forward pass".into()));
    }

    let state = ForwardState {
        h_x,
        h_z,
        gate: fusion.as_ref().and_then(|f| f.gate.clone()),
        attention: fusion.as_ref().and_then(|f| f.weights.clone()),
        h_fused,
        z,
        x_hat,
        a_hat,
    };
    let (v1_z, p1_z, v_z) = match bz {
        Some(b) => (b.v1, b.p1, Some(b.v)),
        None => (None, None, None),
    };
    let cache = Cache {
        v1_x: bx.v1,
        p1_x: bx.p1,
        v_x: bx.v,
        v1_z,
        p1_z,
        v_z,
        q_fused,
        u,
        p_dec,
        masks,
    };
    Ok((state, cache, fusion))
}

/// Full forward pass. Dropout is applied to the branch activations and the
/// latent only in [`Mode::Train`].
pub fn forward(
    params: &ModelParams,
    inputs: &ModelInputs,
    hyper: &Hyperparams,
    mode: Mode,
) -> Result<ForwardState> {
    forward_cached(params, inputs, hyper, mode).map(|(s, _, _)| s)
}

/// Reconstruction losses of a forward state.
pub fn loss(state: &ForwardState, a: &Array2<f64>, x: &Array2<f64>, alpha: f64) -> LossParts {
    let n = a.nrows().max(1) as f64;
    let structural = Zip::from(a)
        .and(&state.a_hat)
        .fold(0.0, |acc, &t, &p| acc + (t - p) * (t - p));
    let attribute = Zip::from(x)
        .and(&state.x_hat)
        .fold(0.0, |acc, &t, &p| acc + (t - p) * (t - p));
    LossParts {
        total: (1.0 - alpha) * structural / n + alpha * attribute / n,
        structural,
        attribute,
    }
}

fn add_bias_grad(db: &mut Array2<f64>, d_pre: &Array2<f64>) {
    db.row_mut(0).assign(&d_pre.sum_axis(Axis(0)));
}

/// Backward through one branch; writes the weight gradients.
#[allow(clippy::too_many_arguments)]
fn branch_backward(
    adj: &NormalizedAdjacency,
    propagated: &Array2<f64>,
    w2: &Array2<f64>,
    v1: &Option<Array2<f64>>,
    p1: &Option<Array2<f64>>,
    v: &Array2<f64>,
    mut d_h: Array2<f64>,
    dw1: &mut Array2<f64>,
    dw2: &mut Array2<f64>,
) {
    relu_backward(&mut d_h, v);
    match (v1, p1) {
        (Some(v1), Some(p1)) => {
            *dw2 = p1.t().dot(&d_h);
            let d_p1 = d_h.dot(&w2.t());
            let mut d_h1 = adj.dot(&d_p1.view());
            relu_backward(&mut d_h1, v1);
            *dw1 = propagated.t().dot(&d_h1);
        }
        _ => *dw1 = propagated.t().dot(&d_h),
    }
}

/// Loss and exact gradients of the training objective
/// `(1 - α) ‖A - Â‖² / n + α ‖X - X̂‖² / n`.
pub fn grad(
    params: &ModelParams,
    inputs: &ModelInputs,
    hyper: &Hyperparams,
    mode: Mode,
) -> Result<(LossParts, Gradients)> {
    let (state, cache, fusion) = forward_cached(params, inputs, hyper, mode)?;
    let alpha = hyper.alpha;
    let n = inputs.n() as f64;
    let parts = loss(&state, &inputs.a, &inputs.x, alpha);
    let mut g = params.zeros_like();

    // decoders
    let d_xhat = (&state.x_hat - &inputs.x) * (2.0 * alpha / n);
    g.w_dec = cache.p_dec.t().dot(&d_xhat);
    let d_pdec = d_xhat.dot(&params.w_dec.t());
    let mut d_z = inputs.adj.dot(&d_pdec.view());

    let coeff = 2.0 * (1.0 - alpha) / n;
    let d_s = structural_delta(&state.a_hat, &inputs.a, coeff);
    // S = Z Zᵀ and dS is symmetric, so dZ = (dS + dSᵀ) Z = 2 dS Z
    d_z.scaled_add(2.0, &d_s.dot(&state.z));

    // fused layer
    if let Some(m) = &cache.masks {
        d_z *= &m.z;
    }
    relu_backward(&mut d_z, &cache.u);
    g.w_fuse = cache.q_fused.t().dot(&d_z);
    let d_q = d_z.dot(&params.w_fuse.t());
    let d_fused = inputs.adj.dot(&d_q.view());

    // fusion
    let h = params.hidden();
    let (mut d_hx, d_hz) = match &fusion {
        None => (d_fused, None),
        Some(f) => {
            let (dx, dz) = fusion_backward(params, &state, f, &d_fused, &mut g, h);
            (dx, Some(dz))
        }
    };

    // branches
    if let Some(m) = &cache.masks {
        d_hx *= &m.h_x;
    }
    branch_backward(
        &inputs.adj,
        &inputs.ax,
        &params.w_x2,
        &cache.v1_x,
        &cache.p1_x,
        &cache.v_x,
        d_hx,
        &mut g.w_x,
        &mut g.w_x2,
    );
    if let Some(mut d_hz) = d_hz {
        if let Some(m) = &cache.masks {
            d_hz *= &m.h_z;
        }
        branch_backward(
            &inputs.adj,
            inputs.az.as_ref().expect("semantic branch"),
            &params.w_z2,
            &cache.v1_z,
            &cache.p1_z,
            cache.v_z.as_ref().expect("semantic branch"),
            d_hz,
            &mut g.w_z,
            &mut g.w_z2,
        );
    }

    if !g.is_finite() {
        return Err(Error::NonFinite("gradient".into()));
    }
    Ok((parts, g))
}

fn fusion_backward(
    params: &ModelParams,
    state: &ForwardState,
    f: &FusionOutput,
    d_fused: &Array2<f64>,
    g: &mut Gradients,
    h: usize,
) -> (Array2<f64>, Array2<f64>) {
    let (hx, hz) = (&state.h_x, &state.h_z);
    match params.fusion {
        Fusion::Gate => {
            let gate = f.gate.as_ref().expect("gate output");
            let mut d_pre = Array2::zeros(gate.raw_dim());
            Zip::from(&mut d_pre)
                .and(d_fused)
                .and(gate)
                .and(hx)
                .and(hz)
                .for_each(|d, &df, &gv, &x, &z| *d = df * (x - z) * gv * (1.0 - gv));
            let cat = concatenate(Axis(1), &[hx.view(), hz.view()]).expect("same rows");
            g.w_g = cat.t().dot(&d_pre);
            add_bias_grad(&mut g.b_g, &d_pre);
            let d_cat = d_pre.dot(&params.w_g.t());
            let mut dx = d_fused * gate;
            dx += &d_cat.slice(s![.., ..h]);
            let mut dz = d_fused * &gate.mapv(|v| 1.0 - v);
            dz += &d_cat.slice(s![.., h..]);
            (dx, dz)
        }
        Fusion::Concat => {
            let cat = concatenate(Axis(1), &[hx.view(), hz.view()]).expect("same rows");
            g.w_g = cat.t().dot(d_fused);
            add_bias_grad(&mut g.b_g, d_fused);
            let d_cat = d_fused.dot(&params.w_g.t());
            (
                d_cat.slice(s![.., ..h]).to_owned(),
                d_cat.slice(s![.., h..]).to_owned(),
            )
        }
        Fusion::Add => (d_fused.clone(), d_fused.clone()),
        Fusion::Multiply => (d_fused * hz, d_fused * hx),
        Fusion::Attention | Fusion::TempAttention => {
            let weights = f.weights.as_ref().expect("attention weights");
            let learn_tau = params.fusion == Fusion::TempAttention;
            let tau = if learn_tau { params.tau[[0, 0]] } else { 1.0 };
            let q = params.query.row(0);
            let sx = hx.dot(&q);
            let sz = hz.dot(&q);
            let n = hx.nrows();
            let mut dx = Array2::zeros(hx.raw_dim());
            let mut dz = Array2::zeros(hz.raw_dim());
            let mut d_query = Array1::<f64>::zeros(h);
            let mut d_tau = 0.0;
            for i in 0..n {
                let (bx, bz) = (weights[[i, 0]], weights[[i, 1]]);
                let dfi = d_fused.row(i);
                let d_bx = dfi.dot(&hx.row(i));
                let d_bz = dfi.dot(&hz.row(i));
                // β_x = sigmoid(t), t = (s_x - s_z) / τ
                let d_t = (d_bx - d_bz) * bx * bz;
                let d_sx = d_t / tau;
                d_tau -= d_t * (sx[i] - sz[i]) / (tau * tau);
                let mut rx = dx.row_mut(i);
                rx.scaled_add(bx, &dfi);
                rx.scaled_add(d_sx, &q);
                let mut rz = dz.row_mut(i);
                rz.scaled_add(bz, &dfi);
                rz.scaled_add(-d_sx, &q);
                d_query.scaled_add(d_sx, &hx.row(i));
                d_query.scaled_add(-d_sx, &hz.row(i));
            }
            g.query.row_mut(0).assign(&d_query);
            if learn_tau {
                g.tau[[0, 0]] = d_tau;
            }
            (dx, dz)
        }
    }
}
