use crate::model::{sigmoid, EmbeddingModel, ModelKind};
use bcg_core::facts::FactStore;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub kind: ModelKind,
    pub dim: usize,
    pub lr: f64,
    pub epochs: usize,
    /// Corruptions per positive and per side.
    pub negatives: usize,
    pub batch_size: usize,
    pub seed: u64,
    /// Weight of the squared norm of the embeddings touched by each example.
    pub l2: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            kind: ModelKind::ComplEx,
            dim: 100,
            lr: 1e-2,
            epochs: 100,
            negatives: 32,
            batch_size: 512,
            seed: 0,
            l2: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TrainError {
    #[error("no training facts")]
    Empty,
    #[error("invalid training configuration: {0}")]
    Config(String),
    #[error("fact {0} is not a binary atom")]
    NotBinary(usize),
    #[error("loss became {loss} in epoch {epoch}, batch {batch}")]
    NonFinite { epoch: usize, batch: usize, loss: f64 },
}

/// A labelled triple by row index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example {
    pub s: usize,
    pub r: usize,
    pub o: usize,
    pub label: f64,
}

/// Dense gradient with the layout of [`EmbeddingModel::params`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub parts: [Vec<f64>; 4],
}

impl Gradient {
    pub fn zeros_like(model: &EmbeddingModel) -> Gradient {
        Gradient {
            parts: model.params().map(|p| vec![0.0; p.len()]),
        }
    }

    fn clear(&mut self) {
        for p in &mut self.parts {
            p.iter_mut().for_each(|v| *v = 0.0);
        }
    }
}

/// Mean binary cross-entropy of `sigmoid(raw)` over `examples`, plus the
/// optional L2 term; accumulates the analytic gradient into `grad`.
pub fn loss_and_grad(model: &EmbeddingModel, examples: &[Example], l2: f64, grad: &mut Gradient) -> f64 {
    grad.clear();
    let k = model.dim;
    let n = examples.len().max(1) as f64;
    let complex = model.kind == ModelKind::ComplEx;
    let [ere, eim, rre, rim] = model.params();
    let mut total = 0.0;
    for ex in examples {
        let x = model.raw(ex.s, ex.r, ex.o);
        // log(1 + e^x) - y x, written to stay finite for large |x|
        let softplus = if x > 0.0 { x + (-x).exp().ln_1p() } else { x.exp().ln_1p() };
        total += softplus - ex.label * x;
        let g = (sigmoid(x) - ex.label) / n;
        let (s, r, o) = (ex.s * k, ex.r * k, ex.o * k);
        for i in 0..k {
            let (sr, si) = (ere[s + i], eim[s + i]);
            let (rr, ri) = (rre[r + i], rim[r + i]);
            let (or, oi) = (ere[o + i], eim[o + i]);
            grad.parts[0][s + i] += g * (rr * or + ri * oi);
            grad.parts[2][r + i] += g * (sr * or + si * oi);
            grad.parts[0][o + i] += g * (sr * rr - si * ri);
            if complex {
                grad.parts[1][s + i] += g * (rr * oi - ri * or);
                grad.parts[3][r + i] += g * (sr * oi - si * or);
                grad.parts[1][o + i] += g * (sr * ri + si * rr);
            }
        }
        if l2 > 0.0 {
            let c = l2 / n;
            for (row, tab) in [(s, 0usize), (r, 2), (o, 0)] {
                for i in 0..k {
                    let (re, im) = (model.params()[tab][row + i], model.params()[tab + 1][row + i]);
                    total += l2 * (re * re + im * im);
                    grad.parts[tab][row + i] += 2.0 * c * re;
                    if complex {
                        grad.parts[tab + 1][row + i] += 2.0 * c * im;
                    }
                }
            }
        }
    }
    total / n
}

struct Adam {
    m: [Vec<f64>; 4],
    v: [Vec<f64>; 4],
    t: i32,
}

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

impl Adam {
    fn new(model: &EmbeddingModel) -> Adam {
        Adam {
            m: model.params().map(|p| vec![0.0; p.len()]),
            v: model.params().map(|p| vec![0.0; p.len()]),
            t: 0,
        }
    }

    fn step(&mut self, model: &mut EmbeddingModel, grad: &Gradient, lr: f64) {
        self.t += 1;
        let c1 = 1.0 - BETA1.powi(self.t);
        let c2 = 1.0 - BETA2.powi(self.t);
        let complex = model.kind == ModelKind::ComplEx;
        for (part, params) in model.params_mut().into_iter().enumerate() {
            if !complex && part % 2 == 1 {
                continue;
            }
            let (m, v, g) = (&mut self.m[part], &mut self.v[part], &grad.parts[part]);
            for i in 0..params.len() {
                m[i] = BETA1 * m[i] + (1.0 - BETA1) * g[i];
                v[i] = BETA2 * v[i] + (1.0 - BETA2) * g[i] * g[i];
                params[i] -= lr * (m[i] / c1) / ((v[i] / c2).sqrt() + ADAM_EPS);
            }
        }
    }
}

/// Trains `model` in place on the facts of `store` with uniformly sampled
/// head and tail corruptions as negatives. Returns the mean loss per epoch.
pub fn train(model: &mut EmbeddingModel, store: &FactStore, cfg: &TrainConfig) -> Result<Vec<f64>, TrainError> {
    if store.is_empty() {
        return Err(TrainError::Empty);
    }
    if cfg.batch_size == 0 || cfg.lr <= 0.0 || !cfg.lr.is_finite() || cfg.l2 < 0.0 {
        return Err(TrainError::Config(format!("{cfg:?}")));
    }
    let mut positives = Vec::with_capacity(store.len());
    for (i, f) in store.iter().enumerate() {
        if f.args.len() != 2 {
            return Err(TrainError::NotBinary(i));
        }
        positives.push(Example {
            s: f.args[0].index(),
            r: f.pred.index(),
            o: f.args[1].index(),
            label: 1.0,
        });
    }
    let entities: Vec<usize> = store.entities().iter().map(|c| c.index()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut grad = Gradient::zeros_like(model);
    let mut adam = Adam::new(model);
    let mut order: Vec<usize> = (0..positives.len()).collect();
    let mut batch = Vec::with_capacity(cfg.batch_size * (1 + 2 * cfg.negatives));
    let mut losses = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut sum = 0.0;
        let mut count = 0usize;
        for (b, chunk) in order.chunks(cfg.batch_size).enumerate() {
            batch.clear();
            for &i in chunk {
                let p = positives[i];
                batch.push(p);
                for _ in 0..cfg.negatives {
                    let e = entities[rng.random_range(0..entities.len())];
                    batch.push(Example { s: e, label: 0.0, ..p });
                    let e = entities[rng.random_range(0..entities.len())];
                    batch.push(Example { o: e, label: 0.0, ..p });
                }
            }
            let loss = loss_and_grad(model, &batch, cfg.l2, &mut grad);
            if !loss.is_finite() {
                return Err(TrainError::NonFinite { epoch, batch: b, loss });
            }
            sum += loss * batch.len() as f64;
            count += batch.len();
            adam.step(model, &grad, cfg.lr);
        }
        losses.push(sum / count as f64);
    }
    Ok(losses)
}
