use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stable::mean_stdev;
use super::{micro_f1, predict, train_classifier, ClassifierParams, SplitSpec};
use crate::embed::Embedding;
use crate::graph::NodeLabels;
use crate::rng::{self, Stream};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValidation {
    /// `folds · reps` values, repetition-major.
    pub micro_f1: Vec<f64>,
    pub mean: f64,
    pub stdev: f64,
    pub stratified: bool,
}

/// Fold index of every labeled node for one repetition: classes are shuffled
/// and dealt round-robin so each fold gets its share of every class.
fn assign_folds(labels: &NodeLabels, nodes: &[usize], folds: usize, stratify: bool, rep_seed: &mut rng::Rng) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); folds];
    let groups: Vec<Vec<usize>> = if stratify {
        let mut by_class: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for &u in nodes {
            by_class.entry(labels.class_of(u).expect("single label")).or_default().push(u);
        }
        by_class.into_values().collect()
    } else {
        vec![nodes.to_vec()]
    };
    let mut next = 0;
    for mut g in groups {
        g.shuffle(rep_seed);
        for u in g {
            out[next % folds].push(u);
            next += 1;
        }
    }
    out.iter_mut().for_each(|f| f.sort_unstable());
    out
}

/// `reps` repetitions of `folds`-fold cross-validation.
pub fn cross_validate(
    e: &Embedding,
    labels: &NodeLabels,
    params: &ClassifierParams,
    folds: usize,
    reps: usize,
    seed: u64,
) -> Result<CrossValidation> {
    let nodes = labels.labeled_nodes();
    if folds < 2 || reps == 0 {
        return Err(Error::Config(format!("need folds >= 2 and reps >= 1, got {folds} and {reps}")));
    }
    if nodes.len() < folds {
        return Err(Error::InsufficientData(format!("{} labeled nodes for {folds} folds", nodes.len())));
    }
    let stratified = !labels.is_multi_label() && {
        let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
        for &u in &nodes {
            *counts.entry(labels.class_of(u).expect("single label")).or_default() += 1;
        }
        counts.values().all(|&c| c >= folds)
    };
    if !labels.is_multi_label() && !stratified {
        log::warn!("a class has fewer than {folds} members; folds are not stratified");
    }
    let jobs: Vec<(usize, usize, SplitSpec)> = (0..reps)
        .flat_map(|rep| {
            let mut r = rng::indexed_stream(seed, Stream::Folds, rep as u64);
            let assignment = assign_folds(labels, &nodes, folds, stratified, &mut r);
            (0..folds)
                .map(|f| {
                    let test_idx = assignment[f].clone();
                    let mut train_idx: Vec<usize> = (0..folds).filter(|&g| g != f).flat_map(|g| assignment[g].iter().copied()).collect();
                    train_idx.sort_unstable();
                    (
                        rep,
                        f,
                        SplitSpec {
                            train_idx,
                            test_idx,
                            seed,
                            fraction: 1.0 - 1.0 / folds as f64,
                            stratified,
                        },
                    )
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let micro: Vec<f64> = jobs
        .par_iter()
        .map(|(rep, f, split)| {
            let cseed = seed.wrapping_add((rep * folds + f) as u64);
            let (model, _) = train_classifier(&e.matrix, labels, split, params, cseed)?;
            Ok(micro_f1(&predict(&model, &e.matrix, &split.test_idx, e.seed)?, labels))
        })
        .collect::<Result<_>>()?;
    let (mean, stdev) = mean_stdev(&micro);
    Ok(CrossValidation {
        micro_f1: micro,
        mean,
        stdev,
        stratified,
    })
}
