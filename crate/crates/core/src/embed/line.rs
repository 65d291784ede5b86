use serde::{Deserialize, Serialize};

use super::sgns::{SgnsConfig, TrainStats, Trainer};
use super::{config_digest, AliasTable, Algorithm, Embedding};
use crate::graph::Graph;
use crate::linalg::row_normalize;
use crate::rng::{self, Stream};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineOrder {
    First,
    Second,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LineConfig {
    pub order: LineOrder,
    /// Edge samples per half are `samples_per_edge * |E|`.
    pub samples_per_edge: usize,
    pub negatives: usize,
    pub initial_lr: f64,
    pub noise_exponent: f64,
    /// Neighborhood densification of sparse vertices. Not implemented;
    /// enabling it is rejected.
    pub densify: bool,
}

impl Default for LineConfig {
    fn default() -> Self {
        Self {
            order: LineOrder::Both,
            samples_per_edge: 100,
            negatives: 5,
            initial_lr: 0.025,
            noise_exponent: 0.75,
            densify: false,
        }
    }
}

/// One LINE half: edges drawn proportional to weight, SGNS update of the
/// source vector against the target (context table for second order, the
/// shared vertex table for first order).
fn train_half(g: &Graph, dim: usize, cfg: &LineConfig, second: bool, seed: u64) -> Result<(crate::linalg::DenseMatrix, TrainStats)> {
    let n = g.node_count();
    let half = if second { 1 } else { 0 };
    let arcs: Vec<(usize, usize, f64)> = g.arcs().collect();
    let edge_table = AliasTable::new(&arcs.iter().map(|a| a.2).collect::<Vec<_>>())?;
    let noise: Vec<f64> = (0..n).map(|u| g.weighted_degree(u)).collect();
    let total = cfg.samples_per_edge * g.edge_count();
    let sgns = SgnsConfig {
        negatives: cfg.negatives,
        initial_lr: cfg.initial_lr,
        noise_exponent: cfg.noise_exponent,
        ..SgnsConfig::new(dim)
    };
    let mut trainer = Trainer::new(
        n,
        &sgns,
        &noise,
        !second,
        rng::indexed_stream(seed, Stream::Init, half),
        rng::indexed_stream(seed, Stream::Negatives, half),
        total,
    )?;
    let mut edge_rng = rng::indexed_stream(seed, Stream::EdgeSampling, half);
    for _ in 0..total {
        let (u, v, _) = arcs[edge_table.sample(&mut edge_rng)];
        trainer.step(u, v);
    }
    let (model, stats) = trainer.finish();
    Ok((row_normalize(&model.input_matrix()).0, stats))
}

/// LINE with first-order, second-order or concatenated (`d/2` each)
/// proximities. Each half is row-normalized before concatenation.
pub fn line_embed(g: &Graph, d: usize, cfg: &LineConfig, seed: u64) -> Result<Embedding> {
    line_train(g, d, cfg, seed).map(|(e, _)| e)
}

/// [`line_embed`] plus the loss summary of each trained half.
pub fn line_train(g: &Graph, d: usize, cfg: &LineConfig, seed: u64) -> Result<(Embedding, Vec<TrainStats>)> {
    if cfg.densify {
        return Err(Error::Config(
            "LINE graph densification is not implemented; set densify = false".into(),
        ));
    }
    if d == 0 {
        return Err(Error::Config("embedding dimension must be positive".into()));
    }
    if cfg.order == LineOrder::Both && d % 2 != 0 {
        return Err(Error::Config(format!("LINE with both orders needs an even dimension, got {d}")));
    }
    if g.arc_count() == 0 {
        return Err(Error::InsufficientData("LINE needs at least one edge".into()));
    }
    let (matrix, stats) = match cfg.order {
        LineOrder::First => {
            let (m, s) = train_half(g, d, cfg, false, seed)?;
            (m, vec![s])
        }
        LineOrder::Second => {
            let (m, s) = train_half(g, d, cfg, true, seed)?;
            (m, vec![s])
        }
        LineOrder::Both => {
            let (first, s1) = train_half(g, d / 2, cfg, false, seed)?;
            let (second, s2) = train_half(g, d / 2, cfg, true, seed)?;
            (first.hstack(&second)?, vec![s1, s2])
        }
    };
    let e = Embedding::new(matrix, Algorithm::Line, seed, config_digest("line", cfg, d))?;
    Ok((e, stats))
}
