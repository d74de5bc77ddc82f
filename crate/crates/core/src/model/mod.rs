//! Dual-branch graph-convolutional autoencoder with gated fusion.
//!
//! ```text
//! H_x   = ReLU(Ã X W_x)                 H_z = ReLU(Ã Z_llm W_z)
//! G     = sigmoid([H_x ‖ H_z] W_g + b_g)
//! H_f   = G ⊙ H_x + (1 - G) ⊙ H_z       (or another fusion strategy)
//! Z     = ReLU(Ã H_f W_fuse)
//! X_hat = Ã Z W_dec                     A_hat = sigmoid(Z Zᵀ)
//! ```
//!
//! Gradients are derived by hand in [`forward`] and checked against central
//! finite differences in the test suite.

mod checkpoint;
mod forward;
mod train;

use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, ArrayView2};
use rand::distributions::{Distribution, Uniform};
use serde::{Deserialize, Serialize};

pub use checkpoint::{load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint};
pub use forward::{
    forward, fuse, grad, loss, DropoutMasks, ForwardState, FusionOutput, LossParts, Mode,
};
pub use train::{
    score, scores_to_csv, train, train_from, Adam, AnomalyScores, TrainOutput, MIN_TEMPERATURE,
};

use crate::error::{Error, Result};
use crate::graph::{normalize_adjacency, Graph, NormalizedAdjacency};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fusion {
    #[default]
    Gate,
    Concat,
    Add,
    Multiply,
    Attention,
    TempAttention,
}

impl Fusion {
    pub const ALL: [Fusion; 6] = [
        Fusion::Gate,
        Fusion::Concat,
        Fusion::Add,
        Fusion::Multiply,
        Fusion::Attention,
        Fusion::TempAttention,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Fusion::Gate => "gate",
            Fusion::Concat => "concat",
            Fusion::Add => "add",
            Fusion::Multiply => "multiply",
            Fusion::Attention => "attention",
            Fusion::TempAttention => "temp-attention",
        }
    }

    fn code(self) -> u8 {
        Fusion::ALL.iter().position(|&f| f == self).unwrap() as u8
    }

    fn from_code(code: u8) -> Option<Self> {
        Fusion::ALL.get(code as usize).copied()
    }
}

impl fmt::Display for Fusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Fusion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Fusion::ALL
            .iter()
            .copied()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown fusion strategy {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Hyperparams {
    pub hidden: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub dropout: f64,
    pub alpha: f64,
    pub fusion: Fusion,
    pub seed: u64,
    /// Graph-convolution layers per encoder branch (1 or 2).
    pub layers: usize,
    /// When false the semantic branch is dropped and the attribute branch
    /// feeds the fused layer directly.
    pub semantic_branch: bool,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            hidden: 64,
            epochs: 200,
            learning_rate: 5e-3,
            dropout: 0.3,
            alpha: 0.8,
            fusion: Fusion::Gate,
            seed: 0,
            layers: 1,
            semantic_branch: true,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if self.hidden == 0 {
            return Err(Error::invalid("hidden dimension must be positive"));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::invalid(format!("dropout {} not in [0, 1)", self.dropout)));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::invalid(format!("alpha {} not in [0, 1]", self.alpha)));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid("learning rate must be positive"));
        }
        if !(1..=2).contains(&self.layers) {
            return Err(Error::invalid(format!("layers must be 1 or 2, got {}", self.layers)));
        }
        Ok(())
    }
}

/// All trainable tensors. Vectors are stored as `1 x k` matrices and the
/// temperature as `1 x 1`, so every slot can be handled uniformly.
///
/// Slots unused by the configured fusion keep their initial values; their
/// gradients are always zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub fusion: Fusion,
    pub layers: usize,
    pub w_x: Array2<f64>,
    pub w_z: Array2<f64>,
    /// Second branch layers (`h x h`), empty for single-layer branches.
    pub w_x2: Array2<f64>,
    pub w_z2: Array2<f64>,
    /// Gate weights (`2h x h`); the linear map for concat fusion.
    pub w_g: Array2<f64>,
    pub b_g: Array2<f64>,
    pub w_fuse: Array2<f64>,
    pub w_dec: Array2<f64>,
    /// Attention query (`1 x h`).
    pub query: Array2<f64>,
    /// Attention temperature (`1 x 1`), learned only by temp-attention.
    pub tau: Array2<f64>,
}

pub const SLOT_NAMES: [&str; 10] = [
    "w_x", "w_z", "w_x2", "w_z2", "w_g", "b_g", "w_fuse", "w_dec", "query", "tau",
];

impl ModelParams {
    pub fn slots(&self) -> [&Array2<f64>; 10] {
        [
            &self.w_x,
            &self.w_z,
            &self.w_x2,
            &self.w_z2,
            &self.w_g,
            &self.b_g,
            &self.w_fuse,
            &self.w_dec,
            &self.query,
            &self.tau,
        ]
    }

    pub fn slots_mut(&mut self) -> [&mut Array2<f64>; 10] {
        [
            &mut self.w_x,
            &mut self.w_z,
            &mut self.w_x2,
            &mut self.w_z2,
            &mut self.w_g,
            &mut self.b_g,
            &mut self.w_fuse,
            &mut self.w_dec,
            &mut self.query,
            &mut self.tau,
        ]
    }

    /// Same shapes, all zeros.
    pub fn zeros_like(&self) -> Self {
        let mut out = self.clone();
        for s in out.slots_mut() {
            s.fill(0.0);
        }
        out
    }

    pub fn hidden(&self) -> usize {
        self.w_fuse.nrows()
    }

    pub fn parameter_count(&self) -> usize {
        self.slots().iter().map(|s| s.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.slots().iter().all(|s| s.iter().all(|v| v.is_finite()))
    }
}

/// Parameter gradients share the parameter layout.
pub type Gradients = ModelParams;

fn glorot(rows: usize, cols: usize, rng: &mut rng::StreamRng) -> Array2<f64> {
    if rows == 0 || cols == 0 {
        return Array2::zeros((rows, cols));
    }
    let bound = (6.0 / (rows + cols) as f64).sqrt();
    let dist = Uniform::new_inclusive(-bound, bound);
    Array2::from_shape_simple_fn((rows, cols), || dist.sample(rng))
}

/// Glorot-uniform weights, zero bias, unit temperature.
///
/// `d_z = 0` builds a model without the semantic branch.
pub fn init_params(
    d_x: usize,
    d_z: usize,
    hidden: usize,
    fusion: Fusion,
    layers: usize,
    seed: u64,
) -> ModelParams {
    init_params_io(d_x, d_z, d_x, hidden, fusion, layers, seed)
}

/// As [`init_params`], with an attribute-branch input width `d_in` that
/// differs from the reconstructed width `d_out`.
pub fn init_params_io(
    d_in: usize,
    d_z: usize,
    d_out: usize,
    hidden: usize,
    fusion: Fusion,
    layers: usize,
    seed: u64,
) -> ModelParams {
    let mut rng = rng::stream(seed, 0, "init");
    let h = hidden;
    let second = |rng: &mut rng::StreamRng, present: bool| {
        if layers == 2 && present {
            glorot(h, h, rng)
        } else {
            Array2::zeros((0, 0))
        }
    };
    let w_x = glorot(d_in, h, &mut rng);
    let w_z = glorot(d_z, h, &mut rng);
    let w_x2 = second(&mut rng, true);
    let w_z2 = second(&mut rng, d_z > 0);
    ModelParams {
        fusion,
        layers,
        w_x,
        w_z,
        w_x2,
        w_z2,
        w_g: glorot(2 * h, h, &mut rng),
        b_g: Array2::zeros((1, h)),
        w_fuse: glorot(h, h, &mut rng),
        w_dec: glorot(h, d_out, &mut rng),
        query: glorot(1, h, &mut rng),
        tau: Array2::from_elem((1, 1), 1.0),
    }
}

/// Everything constant across training steps: propagated inputs, targets,
/// and the normalized adjacency.
#[derive(Debug, Clone)]
pub struct ModelInputs {
    pub adj: NormalizedAdjacency,
    /// `Ã X_in`, where `X_in` is the attribute-branch input.
    pub ax: Array2<f64>,
    /// `Ã Z_llm`, absent without the semantic branch.
    pub az: Option<Array2<f64>>,
    /// Attribute reconstruction target.
    pub x: Array2<f64>,
    /// Dense 0/1 adjacency, the structure reconstruction target.
    pub a: Array2<f64>,
}

impl ModelInputs {
    /// `x_in` feeds the attribute branch and `x_target` is reconstructed;
    /// they coincide except in the attribute-only ablation.
    pub fn new(
        graph: &Graph,
        x_in: ArrayView2<f64>,
        z_llm: Option<ArrayView2<f64>>,
        x_target: ArrayView2<f64>,
    ) -> Result<Self> {
        let n = graph.n();
        for (what, rows) in [
            ("attribute input", x_in.nrows()),
            ("attribute target", x_target.nrows()),
        ]
        .into_iter()
        .chain(z_llm.map(|z| ("semantic embeddings", z.nrows())))
        {
            if rows != n {
                return Err(Error::RowCountMismatch {
                    what: what.into(),
                    expected: n,
                    found: rows,
                });
            }
        }
        let adj = normalize_adjacency(graph);
        Ok(ModelInputs {
            ax: adj.dot(&x_in),
            az: z_llm.map(|z| adj.dot(&z)),
            x: x_target.to_owned(),
            a: graph.dense_adjacency(),
            adj,
        })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn semantic_dim(&self) -> usize {
        self.az.as_ref().map_or(0, |z| z.ncols())
    }

    /// Freshly initialized parameters sized for these inputs.
    pub fn init_params(&self, hyper: &Hyperparams) -> ModelParams {
        init_params_io(
            self.ax.ncols(),
            if hyper.semantic_branch { self.semantic_dim() } else { 0 },
            self.x.ncols(),
            hyper.hidden,
            hyper.fusion,
            hyper.layers,
            hyper.seed,
        )
    }
}
