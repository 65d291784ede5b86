//! Skip-gram with negative sampling.
//!
//! Vector tables are stored as `f32`; losses, coefficients and everything
//! handed to the measures are `f64`.

use rand::Rng;

use super::AliasTable;
use crate::linalg::DenseMatrix;
use crate::rng::Rng as StreamRng;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SgnsConfig {
    pub dim: usize,
    pub negatives: usize,
    pub initial_lr: f64,
    /// Learning rate never decays below `initial_lr * min_lr_fraction`.
    pub min_lr_fraction: f64,
    pub noise_exponent: f64,
}

impl SgnsConfig {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            negatives: 5,
            initial_lr: 0.025,
            min_lr_fraction: 1e-4,
            noise_exponent: 0.75,
        }
    }
}

/// `label − σ(x)`: the negative derivative of the logistic loss of one
/// (input, output) score `x` with respect to `x`.
#[inline]
pub fn logistic_coefficient(x: f64, positive: bool) -> f64 {
    let s = sigmoid(x);
    if positive {
        1.0 - s
    } else {
        -s
    }
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^x)` without overflow.
#[inline]
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairGradient {
    pub loss: f64,
    pub input: Vec<f64>,
    pub positive: Vec<f64>,
    pub negatives: Vec<Vec<f64>>,
}

/// Loss `−ln σ(⟨in, pos⟩) − Σ ln σ(−⟨in, neg_j⟩)` of one training pair and
/// its gradient with respect to every vector involved.
pub fn sgns_loss_and_gradient(input: &[f64], positive: &[f64], negatives: &[&[f64]]) -> PairGradient {
    let d = input.len();
    let mut g_in = vec![0.0; d];
    let mut loss = 0.0;
    let mut term = |ctx: &[f64], is_pos: bool, g_in: &mut [f64]| -> Vec<f64> {
        let x = crate::linalg::dot(input, ctx);
        loss += if is_pos { softplus(-x) } else { softplus(x) };
        let c = logistic_coefficient(x, is_pos);
        for (g, &v) in g_in.iter_mut().zip(ctx) {
            *g -= c * v;
        }
        input.iter().map(|&v| -c * v).collect()
    };
    let positive_grad = term(positive, true, &mut g_in);
    let negative_grads = negatives.iter().map(|n| term(n, false, &mut g_in)).collect();
    PairGradient {
        loss,
        input: g_in,
        positive: positive_grad,
        negatives: negative_grads,
    }
}

/// Input and context vector tables. A tied model reads context vectors from
/// the input table (first-order LINE).
#[derive(Debug, Clone, PartialEq)]
pub struct SgnsModel {
    n: usize,
    dim: usize,
    input: Vec<f32>,
    context: Vec<f32>,
    tied: bool,
}

impl SgnsModel {
    /// Input vectors uniform in `(−0.5/d, 0.5/d)`, context vectors zero.
    pub fn new(n: usize, dim: usize, tied: bool, init_rng: &mut StreamRng) -> Self {
        let half = 0.5 / dim as f64;
        let input = (0..n * dim).map(|_| init_rng.random_range(-half..half) as f32).collect();
        let context = if tied { Vec::new() } else { vec![0.0; n * dim] };
        Self {
            n,
            dim,
            input,
            context,
            tied,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn input_vector(&self, u: usize) -> &[f32] {
        &self.input[u * self.dim..(u + 1) * self.dim]
    }

    pub fn context_vector(&self, u: usize) -> &[f32] {
        let table = if self.tied { &self.input } else { &self.context };
        &table[u * self.dim..(u + 1) * self.dim]
    }

    /// Input table promoted to `f64`.
    pub fn input_matrix(&self) -> DenseMatrix {
        DenseMatrix::from_vec(self.n, self.dim, self.input.iter().map(|&v| v as f64).collect())
            .expect("table size matches shape")
    }

    /// One gradient step on `(center, target)` and the given negatives.
    /// Returns the pair loss evaluated before the update.
    pub fn step(&mut self, center: usize, target: usize, negatives: &[usize], lr: f64, scratch: &mut Scratch) -> f64 {
        let d = self.dim;
        scratch.hidden.clear();
        scratch.hidden.extend_from_slice(&self.input[center * d..(center + 1) * d]);
        scratch.err.clear();
        scratch.err.resize(d, 0.0);
        let table = if self.tied { &mut self.input } else { &mut self.context };

        let mut loss = 0.0;
        let mut update = |ctx: usize, positive: bool| {
            let row = &mut table[ctx * d..(ctx + 1) * d];
            let x: f32 = scratch.hidden.iter().zip(row.iter()).map(|(a, b)| a * b).sum();
            let x = x as f64;
            loss += if positive { softplus(-x) } else { softplus(x) };
            let g = (logistic_coefficient(x, positive) * lr) as f32;
            for ((e, c), h) in scratch.err.iter_mut().zip(row.iter_mut()).zip(&scratch.hidden) {
                *e += g * *c;
                *c += g * h;
            }
        };
        update(target, true);
        for &n in negatives {
            update(n, false);
        }
        for (v, e) in self.input[center * d..(center + 1) * d].iter_mut().zip(&scratch.err) {
            *v += e;
        }
        loss
    }
}

/// Reusable buffers for [`SgnsModel::step`].
#[derive(Debug, Default)]
pub struct Scratch {
    hidden: Vec<f32>,
    err: Vec<f32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrainStats {
    pub steps: usize,
    /// Mean pair loss over the first tenth of the steps.
    pub early_loss: f64,
    /// Mean pair loss over the last tenth of the steps.
    pub late_loss: f64,
}

/// Drives an [`SgnsModel`] through a linearly decaying learning-rate
/// schedule, drawing negatives from a noise table.
pub(crate) struct Trainer<'a> {
    pub model: SgnsModel,
    cfg: &'a SgnsConfig,
    noise: AliasTable,
    neg_rng: StreamRng,
    total: usize,
    step: usize,
    negatives: Vec<usize>,
    scratch: Scratch,
    early: (f64, usize),
    late: (f64, usize),
}

impl<'a> Trainer<'a> {
    pub fn new(
        n: usize,
        cfg: &'a SgnsConfig,
        noise_weights: &[f64],
        tied: bool,
        mut init_rng: StreamRng,
        neg_rng: StreamRng,
        total: usize,
    ) -> Result<Self> {
        if cfg.dim == 0 {
            return Err(Error::Config("embedding dimension must be positive".into()));
        }
        if noise_weights.len() != n {
            return Err(Error::Shape(format!("{} noise weights for {n} nodes", noise_weights.len())));
        }
        let powered: Vec<f64> = noise_weights.iter().map(|w| w.powf(cfg.noise_exponent)).collect();
        let noise = AliasTable::new(&powered)?;
        Ok(Self {
            model: SgnsModel::new(n, cfg.dim, tied, &mut init_rng),
            cfg,
            noise,
            neg_rng,
            total,
            step: 0,
            negatives: Vec::with_capacity(cfg.negatives),
            scratch: Scratch::default(),
            early: (0.0, 0),
            late: (0.0, 0),
        })
    }

    pub fn learning_rate(&self) -> f64 {
        let progress = if self.total == 0 { 0.0 } else { self.step as f64 / self.total as f64 };
        self.cfg.initial_lr * (1.0 - progress).max(self.cfg.min_lr_fraction)
    }

    pub fn step(&mut self, center: usize, target: usize) {
        self.negatives.clear();
        for _ in 0..self.cfg.negatives {
            let n = self.noise.sample(&mut self.neg_rng);
            if n != target {
                self.negatives.push(n);
            }
        }
        let lr = self.learning_rate();
        let loss = self.model.step(center, target, &self.negatives, lr, &mut self.scratch);
        let decile = (self.total / 10).max(1);
        if self.step < decile {
            self.early.0 += loss;
            self.early.1 += 1;
        }
        if self.step + decile >= self.total {
            self.late.0 += loss;
            self.late.1 += 1;
        }
        self.step += 1;
    }

    pub fn finish(self) -> (SgnsModel, TrainStats) {
        let mean = |(s, n): (f64, usize)| if n == 0 { 0.0 } else { s / n as f64 };
        let stats = TrainStats {
            steps: self.step,
            early_loss: mean(self.early),
            late_loss: mean(self.late),
        };
        (self.model, stats)
    }
}

/// Trains input/context tables on a stream of `(center, context)` pairs.
///
/// `total_pairs` sizes the learning-rate schedule and should equal the
/// stream length. Initialization and negative draws use separate RNG streams.
pub fn sgns_train(
    pairs: impl IntoIterator<Item = (usize, usize)>,
    total_pairs: usize,
    n: usize,
    cfg: &SgnsConfig,
    noise_weights: &[f64],
    init_rng: StreamRng,
    neg_rng: StreamRng,
) -> Result<(SgnsModel, TrainStats)> {
    let mut trainer = Trainer::new(n, cfg, noise_weights, false, init_rng, neg_rng, total_pairs)?;
    for (c, t) in pairs {
        trainer.step(c, t);
    }
    Ok(trainer.finish())
}
