use std::fmt::Write as _;

use ndarray::{Array1, Array2, Zip};

use super::forward::{forward, grad, LossParts, Mode};
use super::{Fusion, Gradients, Hyperparams, ModelInputs, ModelParams};
use crate::error::{Error, Result};

/// Smallest temperature allowed after an optimizer step.
pub const MIN_TEMPERATURE: f64 = 1e-3;

/// Adam with bias correction.
#[derive(Debug, Clone)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    t: i32,
    m: Gradients,
    v: Gradients,
}

impl Adam {
    pub fn new(params: &ModelParams, lr: f64) -> Self {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            m: params.zeros_like(),
            v: params.zeros_like(),
        }
    }

    pub fn steps(&self) -> i32 {
        self.t
    }

    pub fn step(&mut self, params: &mut ModelParams, grads: &Gradients) {
        self.t += 1;
        let (b1, b2, eps, lr) = (self.beta1, self.beta2, self.eps, self.lr);
        let c1 = 1.0 - b1.powi(self.t);
        let c2 = 1.0 - b2.powi(self.t);
        for (((p, g), m), v) in params
            .slots_mut()
            .into_iter()
            .zip(grads.slots())
            .zip(self.m.slots_mut())
            .zip(self.v.slots_mut())
        {
            Zip::from(p).and(g).and(m).and(v).for_each(|p, &g, m, v| {
                *m = b1 * *m + (1.0 - b1) * g;
                *v = b2 * *v + (1.0 - b2) * g * g;
                *p -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
            });
        }
        if params.fusion == Fusion::TempAttention {
            let tau = &mut params.tau[[0, 0]];
            *tau = tau.max(MIN_TEMPERATURE);
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub params: ModelParams,
    /// Loss before each optimizer step (dropout active).
    pub history: Vec<LossParts>,
}

/// Full-batch training for `hyper.epochs` Adam steps from a fresh
/// initialization.
pub fn train(inputs: &ModelInputs, hyper: &Hyperparams) -> Result<TrainOutput> {
    let params = inputs.init_params(hyper);
    train_from(params, inputs, hyper)
}

/// Training from given parameters.
pub fn train_from(
    mut params: ModelParams,
    inputs: &ModelInputs,
    hyper: &Hyperparams,
) -> Result<TrainOutput> {
    hyper.validate()?;
    if params.fusion != hyper.fusion {
        return Err(Error::invalid(format!(
            "parameters use {} fusion, hyperparameters ask for {}",
            params.fusion, hyper.fusion
        )));
    }
    let mut adam = Adam::new(&params, hyper.learning_rate);
    let mut history = Vec::with_capacity(hyper.epochs);
    for epoch in 0..hyper.epochs {
        let mode = Mode::Train {
            seed: hyper.seed,
            step: epoch as u64,
        };
        let (parts, grads) = match grad(&params, inputs, hyper, mode) {
            Ok(r) => r,
            Err(Error::NonFinite(_)) => {
                return Err(Error::Diverged {
                    epoch,
                    loss: f64::NAN,
                })
            }
            Err(e) => return Err(e),
        };
        if !parts.total.is_finite() {
            return Err(Error::Diverged {
                epoch,
                loss: parts.total,
            });
        }
        if epoch % 50 == 0 {
            log::debug!("epoch {epoch}: loss {:.6}", parts.total);
        }
        history.push(parts);
        adam.step(&mut params, &grads);
        if !params.is_finite() {
            return Err(Error::Diverged {
                epoch,
                loss: parts.total,
            });
        }
    }
    Ok(TrainOutput { params, history })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnomalyScores {
    /// `(1 - α) ‖a_i - â_i‖² + α ‖x_i - x̂_i‖²`
    pub scores: Array1<f64>,
    /// `‖a_i - â_i‖²`
    pub structural: Array1<f64>,
    /// `‖x_i - x̂_i‖²`
    pub attribute: Array1<f64>,
    pub alpha: f64,
}

fn row_sq_errors(a: &Array2<f64>, b: &Array2<f64>) -> Array1<f64> {
    let mut d = a - b;
    d.mapv_inplace(|v| v * v);
    d.sum_axis(ndarray::Axis(1))
}

/// Eval-mode reconstruction-error scores.
pub fn score(
    params: &ModelParams,
    inputs: &ModelInputs,
    hyper: &Hyperparams,
    alpha: f64,
) -> Result<AnomalyScores> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid(format!("alpha {alpha} not in [0, 1]")));
    }
    let state = forward(params, inputs, hyper, Mode::Eval)?;
    let structural = row_sq_errors(&inputs.a, &state.a_hat);
    let attribute = row_sq_errors(&inputs.x, &state.x_hat);
    let scores = &structural * (1.0 - alpha) + &attribute * alpha;
    Ok(AnomalyScores {
        scores,
        structural,
        attribute,
        alpha,
    })
}

/// `node_id,score[,label]` with one row per node.
pub fn scores_to_csv(scores: &AnomalyScores, node_ids: &[i64], labels: Option<&[u8]>) -> String {
    let mut out = String::from(if labels.is_some() {
        "node_id,score,label\n"
    } else {
        "node_id,score\n"
    });
    for (i, s) in scores.scores.iter().enumerate() {
        let id = node_ids.get(i).copied().unwrap_or(i as i64);
        match labels {
            Some(l) => writeln!(out, "{id},{s},{}", l[i]),
            None => writeln!(out, "{id},{s}"),
        }
        .expect("write to string");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::rng;
    use rand::Rng;

    fn toy(alpha: f64, epochs: usize) -> (ModelInputs, Hyperparams) {
        let mut r = rng::stream(7, 0, "toy");
        let g = Graph::new(8, (0..8).flat_map(|i| [(i, (i + 1) % 8), (i, (i + 2) % 8)])).unwrap();
        let x = Array2::from_shape_simple_fn((8, 5), || r.gen_range(0.0..1.0));
        let z = Array2::from_shape_simple_fn((8, 7), || r.gen_range(-1.0..1.0));
        let inputs = ModelInputs::new(&g, x.view(), Some(z.view()), x.view()).unwrap();
        let hyper = Hyperparams {
            hidden: 4,
            epochs,
            alpha,
            ..Default::default()
        };
        (inputs, hyper)
    }

    #[test]
    fn training_reduces_loss_and_is_deterministic() {
        let (inputs, hyper) = toy(0.8, 200);
        let a = train(&inputs, &hyper).unwrap();
        let b = train(&inputs, &hyper).unwrap();
        assert_eq!(a.history, b.history);
        assert_eq!(a.params, b.params);
        let first = a.history[0].total;
        let eval = |p: &ModelParams| {
            let st = forward(p, &inputs, &hyper, Mode::Eval).unwrap();
            super::super::loss(&st, &inputs.a, &inputs.x, hyper.alpha).total
        };
        assert!(eval(&a.params) < eval(&inputs.init_params(&hyper)));
        assert!(a.history.last().unwrap().total < first);
    }

    #[test]
    fn zero_alpha_leaves_decoder_untouched() {
        let (inputs, hyper) = toy(0.0, 30);
        let init = inputs.init_params(&hyper);
        let out = train(&inputs, &hyper).unwrap();
        assert_eq!(out.params.w_dec, init.w_dec);
        assert_ne!(out.params.w_fuse, init.w_fuse);
    }

    #[test]
    fn score_examples() {
        let s = AnomalyScores {
            scores: Array1::zeros(0),
            structural: Array1::from(vec![1.0]),
            attribute: Array1::from(vec![2.0]),
            alpha: 0.8,
        };
        let v = (1.0 - s.alpha) * s.structural[0] + s.alpha * s.attribute[0];
        assert!((v - 1.8).abs() < 1e-15);

        let (inputs, hyper) = toy(0.8, 20);
        let out = train(&inputs, &hyper).unwrap();
        let sc = score(&out.params, &inputs, &hyper, 0.8).unwrap();
        let st = forward(&out.params, &inputs, &hyper, Mode::Eval).unwrap();
        let l = super::super::loss(&st, &inputs.a, &inputs.x, 0.8);
        assert!(sc.scores.iter().all(|&v| v >= 0.0));
        let expect = 0.2 * l.structural + 0.8 * l.attribute;
        assert!((sc.scores.sum() - expect).abs() < 1e-9);
        assert!((sc.structural.sum() - l.structural).abs() < 1e-9);
    }

    #[test]
    fn temperature_stays_positive() {
        let (inputs, mut hyper) = toy(0.8, 40);
        hyper.fusion = Fusion::TempAttention;
        hyper.learning_rate = 0.5;
        let out = train(&inputs, &hyper).unwrap();
        assert!(out.params.tau[[0, 0]] >= MIN_TEMPERATURE);
    }

    #[test]
    fn csv_layout() {
        let s = AnomalyScores {
            scores: Array1::from(vec![0.5, 1.25]),
            structural: Array1::zeros(2),
            attribute: Array1::zeros(2),
            alpha: 0.8,
        };
        assert_eq!(scores_to_csv(&s, &[10, 11], Some(&[0, 1])), "node_id,score,label\n10,0.5,0\n11,1.25,1\n");
        assert_eq!(scores_to_csv(&s, &[], None), "node_id,score\n0,0.5\n1,1.25\n");
    }
}
