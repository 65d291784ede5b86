use rand::Rng;

use super::sgns::{SgnsConfig, TrainStats, Trainer};
use super::{config_digest, random_walks, Algorithm, Embedding};
use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::rng::{self, Stream};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Node2vecConfig {
    /// Return parameter.
    pub p: f64,
    /// In-out parameter.
    pub q: f64,
    pub walks_per_node: usize,
    pub walk_length: usize,
    /// Maximum context window; each center draws its own width in `1..=window`.
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub initial_lr: f64,
}

impl Default for Node2vecConfig {
    fn default() -> Self {
        Self {
            p: 1.0,
            q: 1.0,
            walks_per_node: 10,
            walk_length: 80,
            window: 10,
            negatives: 5,
            epochs: 1,
            initial_lr: 0.025,
        }
    }
}

impl Node2vecConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = self.p > 0.0
            && self.q > 0.0
            && self.walks_per_node > 0
            && self.walk_length > 0
            && self.window > 0
            && self.epochs > 0
            && self.initial_lr > 0.0;
        if !positive || !self.p.is_finite() || !self.q.is_finite() {
            return Err(Error::Config(format!("node2vec parameters must be positive: {self:?}")));
        }
        if self.window > self.walk_length {
            return Err(Error::Config(format!(
                "window {} exceeds walk length {}",
                self.window, self.walk_length
            )));
        }
        Ok(())
    }
}

/// Calls `f(center, context)` for every skip-gram pair of one pass over the
/// corpus, drawing each center's window width from `rng`.
fn for_each_pair(walks: &[Vec<u32>], window: usize, rng: &mut rng::Rng, mut f: impl FnMut(usize, usize)) {
    for walk in walks {
        let len = walk.len();
        for i in 0..len {
            let b = rng.random_range(1..=window);
            let lo = i.saturating_sub(b);
            let hi = (i + b).min(len - 1);
            for j in lo..=hi {
                if j != i {
                    f(walk[i] as usize, walk[j] as usize);
                }
            }
        }
    }
}

/// node2vec: biased walks, skip-gram pairs with sampled window widths, and
/// SGNS against the unigram corpus frequency raised to 0.75.
///
/// Walks, window widths, vector initialization and negative draws each read
/// their own stream of `seed`.
pub fn node2vec_embed(g: &Graph, d: usize, cfg: &Node2vecConfig, seed: u64) -> Result<Embedding> {
    node2vec_train(g, d, cfg, seed).map(|(e, _)| e)
}

/// [`node2vec_embed`] plus the SGNS loss summary.
pub fn node2vec_train(g: &Graph, d: usize, cfg: &Node2vecConfig, seed: u64) -> Result<(Embedding, TrainStats)> {
    cfg.validate()?;
    if d == 0 {
        return Err(Error::Config("embedding dimension must be positive".into()));
    }
    let n = g.node_count();
    let walks = random_walks(g, cfg, seed);

    let mut freq = vec![0.0f64; n];
    for w in &walks {
        for &u in w {
            freq[u as usize] += 1.0;
        }
    }

    // count first so the learning-rate schedule knows its length, then
    // replay the identical window draws
    let windows = rng::stream(seed, Stream::Windows);
    let mut counter = windows.clone();
    let mut total = 0usize;
    for _ in 0..cfg.epochs {
        for_each_pair(&walks, cfg.window, &mut counter, |_, _| total += 1);
    }

    let sgns = SgnsConfig {
        negatives: cfg.negatives,
        initial_lr: cfg.initial_lr,
        ..SgnsConfig::new(d)
    };
    let mut trainer = Trainer::new(
        n,
        &sgns,
        &freq,
        false,
        rng::stream(seed, Stream::Init),
        rng::stream(seed, Stream::Negatives),
        total,
    )?;
    let mut windows = windows;
    for _ in 0..cfg.epochs {
        for_each_pair(&walks, cfg.window, &mut windows, |c, t| trainer.step(c, t));
    }
    let (model, stats) = trainer.finish();
    log::debug!(
        "node2vec seed {seed}: {} pairs, loss {:.4} -> {:.4}",
        stats.steps,
        stats.early_loss,
        stats.late_loss
    );
    let e = Embedding::new(model.input_matrix(), Algorithm::Node2vec, seed, config_digest("node2vec", cfg, d))?;
    Ok((e, stats))
}
