//! Seeded logistic regression on embedding rows.

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::Normal;
use serde::{Deserialize, Serialize};

use super::SplitSpec;
use crate::graph::NodeLabels;
use crate::linalg::DenseMatrix;
use crate::rng::{self, Stream};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierMode {
    MulticlassSoftmax,
    MultilabelOvr,
}

impl ClassifierMode {
    pub fn for_labels(labels: &NodeLabels) -> Self {
        if labels.is_multi_label() {
            ClassifierMode::MultilabelOvr
        } else {
            ClassifierMode::MulticlassSoftmax
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierParams {
    pub epochs: usize,
    pub batch: usize,
    pub lr: f64,
    pub l2: f64,
}

impl Default for ClassifierParams {
    fn default() -> Self {
        Self {
            epochs: 100,
            batch: 64,
            lr: 0.1,
            l2: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierModel {
    /// `d × L`.
    pub weights: DenseMatrix,
    pub bias: Vec<f64>,
    pub mode: ClassifierMode,
    pub train_seed: u64,
}

/// Full-training-set loss before the first epoch and after each one.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingTrace {
    pub losses: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossGradient {
    pub loss: f64,
    pub weights: DenseMatrix,
    pub bias: Vec<f64>,
}

/// Row scores `x W + b` turned into class probabilities (softmax) or
/// independent label probabilities (sigmoid), in place.
fn activate(scores: &mut [f64], mode: ClassifierMode) {
    match mode {
        ClassifierMode::MulticlassSoftmax => {
            let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut sum = 0.0;
            for s in scores.iter_mut() {
                *s = (*s - max).exp();
                sum += *s;
            }
            scores.iter_mut().for_each(|s| *s /= sum);
        }
        ClassifierMode::MultilabelOvr => {
            for s in scores.iter_mut() {
                *s = 1.0 / (1.0 + (-*s).exp());
            }
        }
    }
}

fn scores(x: &[f64], w: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let mut out = b.to_vec();
    for (xi, wrow) in x.iter().zip(0..w.rows()) {
        for (o, wv) in out.iter_mut().zip(w.row(wrow)) {
            *o += xi * wv;
        }
    }
    out
}

/// Mean cross-entropy over `rows` plus `l2/2 · ‖W‖²`, and its gradient.
///
/// `targets` is `rows.len() × L` with 0/1 entries (one-hot for softmax).
pub fn loss_and_gradient(
    x: &DenseMatrix,
    rows: &[usize],
    targets: &DenseMatrix,
    weights: &DenseMatrix,
    bias: &[f64],
    mode: ClassifierMode,
    l2: f64,
) -> LossGradient {
    let (d, l) = weights.shape();
    let mut gw = DenseMatrix::zeros(d, l);
    let mut gb = vec![0.0; l];
    let mut loss = 0.0;
    let m = rows.len().max(1) as f64;
    for (t, &r) in rows.iter().enumerate() {
        let xr = x.row(r);
        let raw = scores(xr, weights, bias);
        let y = targets.row(t);
        loss += match mode {
            ClassifierMode::MulticlassSoftmax => {
                let max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let lse = max + raw.iter().map(|s| (s - max).exp()).sum::<f64>().ln();
                raw.iter().zip(y).map(|(s, yy)| yy * (lse - s)).sum::<f64>()
            }
            ClassifierMode::MultilabelOvr => raw
                .iter()
                .zip(y)
                .map(|(&s, &yy)| softplus(s) - yy * s)
                .sum::<f64>(),
        };
        let mut p = raw;
        activate(&mut p, mode);
        for j in 0..l {
            let delta = (p[j] - y[j]) / m;
            gb[j] += delta;
            for (i, xi) in xr.iter().enumerate() {
                gw[(i, j)] += delta * xi;
            }
        }
    }
    loss /= m;
    let norm: f64 = weights.as_slice().iter().map(|w| w * w).sum();
    loss += 0.5 * l2 * norm;
    for (g, w) in gw.as_mut_slice().iter_mut().zip(weights.as_slice()) {
        *g += l2 * w;
    }
    LossGradient {
        loss,
        weights: gw,
        bias: gb,
    }
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn target_matrix(labels: &NodeLabels, nodes: &[usize]) -> DenseMatrix {
    let mut y = DenseMatrix::zeros(nodes.len(), labels.label_count());
    for (t, &u) in nodes.iter().enumerate() {
        for &c in labels.labels_of(u) {
            y[(t, c as usize)] = 1.0;
        }
    }
    y
}

/// Mini-batch gradient descent from a seeded `N(0, 0.01²)` start, reshuffling
/// the training nodes every epoch.
pub fn train_classifier(
    x: &DenseMatrix,
    labels: &NodeLabels,
    split: &SplitSpec,
    params: &ClassifierParams,
    seed: u64,
) -> Result<(ClassifierModel, TrainingTrace)> {
    if x.rows() != labels.node_count() {
        return Err(Error::Shape(format!(
            "embedding has {} rows, labels cover {} nodes",
            x.rows(),
            labels.node_count()
        )));
    }
    let train = &split.train_idx;
    if train.is_empty() {
        return Err(Error::InsufficientData("training set is empty".into()));
    }
    if params.batch == 0 || params.epochs == 0 || !(params.lr > 0.0) || params.l2 < 0.0 {
        return Err(Error::Config(format!("invalid classifier parameters {params:?}")));
    }
    let mode = ClassifierMode::for_labels(labels);
    let (d, l) = (x.cols(), labels.label_count());
    let mut init = rng::stream(seed, Stream::ClassifierInit);
    let normal = Normal::new(0.0, 0.01).expect("valid normal");
    let mut weights = DenseMatrix::from_fn(d, l, |_, _| init.sample(normal));
    let mut bias = vec![0.0; l];

    let all_targets = target_matrix(labels, train);
    let positions: Vec<usize> = (0..train.len()).collect();
    let full_loss = |w: &DenseMatrix, b: &[f64]| loss_and_gradient(x, train, &all_targets, w, b, mode, params.l2).loss;
    let mut losses = vec![full_loss(&weights, &bias)];
    let mut shuffle = rng::stream(seed, Stream::ClassifierShuffle);
    let mut order = positions.clone();
    for epoch in 0..params.epochs {
        order.shuffle(&mut shuffle);
        for chunk in order.chunks(params.batch) {
            let rows: Vec<usize> = chunk.iter().map(|&p| train[p]).collect();
            let targets = DenseMatrix::from_fn(chunk.len(), l, |t, j| all_targets[(chunk[t], j)]);
            let g = loss_and_gradient(x, &rows, &targets, &weights, &bias, mode, params.l2);
            for (w, gw) in weights.as_mut_slice().iter_mut().zip(g.weights.as_slice()) {
                *w -= params.lr * gw;
            }
            for (b, gb) in bias.iter_mut().zip(&g.bias) {
                *b -= params.lr * gb;
            }
        }
        let loss = full_loss(&weights, &bias);
        if !loss.is_finite() || !weights.is_finite() {
            return Err(Error::Numerical(format!(
                "classifier diverged in epoch {epoch} (loss {loss}); try a lower learning rate than {}",
                params.lr
            )));
        }
        losses.push(loss);
    }
    Ok((
        ClassifierModel {
            weights,
            bias,
            mode,
            train_seed: seed,
        },
        TrainingTrace { losses },
    ))
}

/// Predictions for the nodes in `idx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRun {
    pub test_idx: Vec<usize>,
    /// One label per node for softmax models, a possibly empty label set for
    /// one-vs-rest models.
    pub predictions: Vec<Vec<u32>>,
    pub embedding_seed: u64,
    pub classifier_seed: u64,
}

/// Argmax (lowest label on ties) or per-label threshold 0.5.
pub fn predict(model: &ClassifierModel, x: &DenseMatrix, idx: &[usize], embedding_seed: u64) -> Result<PredictionRun> {
    if x.cols() != model.weights.rows() {
        return Err(Error::Shape(format!(
            "model expects dimension {}, embedding has {}",
            model.weights.rows(),
            x.cols()
        )));
    }
    let predictions = idx
        .iter()
        .map(|&u| {
            let mut p = scores(x.row(u), &model.weights, &model.bias);
            activate(&mut p, model.mode);
            match model.mode {
                ClassifierMode::MulticlassSoftmax => {
                    let mut best = 0;
                    for (j, &v) in p.iter().enumerate() {
                        if v > p[best] {
                            best = j;
                        }
                    }
                    vec![best as u32]
                }
                ClassifierMode::MultilabelOvr => (0..p.len()).filter(|&j| p[j] > 0.5).map(|j| j as u32).collect(),
            }
        })
        .collect();
    Ok(PredictionRun {
        test_idx: idx.to_vec(),
        predictions,
        embedding_seed,
        classifier_seed: model.train_seed,
    })
}
