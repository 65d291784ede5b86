use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{micro_f1, predict, train_classifier, ClassifierParams, PredictionRun, SplitSpec};
use crate::embed::Embedding;
use crate::graph::NodeLabels;
use crate::rng::{self, Stream};
use crate::{Error, Result};

/// Share of test nodes predicted identically (exact label-set equality) by
/// every run.
pub fn stable_core(runs: &[PredictionRun]) -> Result<f64> {
    if runs.len() < 2 {
        return Err(Error::InsufficientData(format!("stable core needs at least 2 runs, got {}", runs.len())));
    }
    let first = &runs[0];
    if let Some(i) = runs.iter().position(|r| r.test_idx != first.test_idx) {
        return Err(Error::Shape(format!("run {i} was evaluated on different test nodes")));
    }
    if first.test_idx.is_empty() {
        return Err(Error::InsufficientData("empty test set".into()));
    }
    let stable = (0..first.test_idx.len())
        .filter(|&t| runs.iter().all(|r| r.predictions[t] == first.predictions[t]))
        .count();
    Ok(stable as f64 / first.test_idx.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingCore {
    pub embedding_seed: u64,
    pub classifier_seeds: Vec<u64>,
    pub stable_core: f64,
    pub micro_f1: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeI {
    pub per_embedding: Vec<EmbeddingCore>,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeII {
    /// Shared by every embedding, so the spread isolates the embeddings.
    pub classifier_seed: u64,
    pub embedding_seeds: Vec<u64>,
    pub stable_core: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StableCoreReport {
    pub mode_i: ModeI,
    pub mode_ii: ModeII,
    /// Micro-F1 of each mode (ii) run, one per embedding.
    pub f1_distribution: Vec<f64>,
    pub f1_mean: f64,
    pub f1_stdev: f64,
    pub test_size: usize,
}

pub(crate) fn mean_stdev(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 {
        v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

/// Classifier-seed used for repetition `rep` of mode (i); repetition 0 is the
/// fixed seed of mode (ii).
pub fn classifier_seed(seed: u64, rep: usize) -> u64 {
    seed.wrapping_add(rep as u64)
}

/// Stable cores with (i) `reps` classifier seeds on each of `sample_count`
/// embeddings drawn without replacement, and (ii) one classifier with a fixed
/// seed on every embedding. All runs share `split`.
pub fn stability_experiment(
    runs: &[Embedding],
    labels: &NodeLabels,
    split: &SplitSpec,
    params: &ClassifierParams,
    sample_count: usize,
    reps: usize,
    seed: u64,
) -> Result<StableCoreReport> {
    if reps < 2 {
        return Err(Error::Config(format!("mode (i) needs at least 2 classifier seeds, got {reps}")));
    }
    if runs.len() < 2 || runs.len() < sample_count || sample_count == 0 {
        return Err(Error::Config(format!(
            "need at least max(2, sample_count = {sample_count}) embeddings, got {}",
            runs.len()
        )));
    }
    let fit = |e: &Embedding, cseed: u64| -> Result<PredictionRun> {
        let (model, _) = train_classifier(&e.matrix, labels, split, params, cseed)?;
        predict(&model, &e.matrix, &split.test_idx, e.seed)
    };

    let mut choice = rng::stream(seed, Stream::EmbeddingChoice);
    let mut chosen = sample(&mut choice, runs.len(), sample_count).into_vec();
    chosen.sort_unstable();
    let seeds: Vec<u64> = (0..reps).map(|r| classifier_seed(seed, r)).collect();
    let jobs: Vec<(usize, u64)> = chosen.iter().flat_map(|&e| seeds.iter().map(move |&s| (e, s))).collect();
    let predictions: Vec<PredictionRun> = jobs.par_iter().map(|&(e, s)| fit(&runs[e], s)).collect::<Result<_>>()?;
    let per_embedding = chosen
        .iter()
        .zip(predictions.chunks(reps))
        .map(|(&e, preds)| {
            Ok(EmbeddingCore {
                embedding_seed: runs[e].seed,
                classifier_seeds: seeds.clone(),
                stable_core: stable_core(preds)?,
                micro_f1: preds.iter().map(|p| micro_f1(p, labels)).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mean = per_embedding.iter().map(|c| c.stable_core).sum::<f64>() / per_embedding.len() as f64;

    let fixed = classifier_seed(seed, 0);
    let across: Vec<PredictionRun> = runs.par_iter().map(|e| fit(e, fixed)).collect::<Result<_>>()?;
    let f1_distribution: Vec<f64> = across.iter().map(|p| micro_f1(p, labels)).collect();
    let (f1_mean, f1_stdev) = mean_stdev(&f1_distribution);
    Ok(StableCoreReport {
        mode_i: ModeI { per_embedding, mean },
        mode_ii: ModeII {
            classifier_seed: fixed,
            embedding_seeds: runs.iter().map(|e| e.seed).collect(),
            stable_core: stable_core(&across)?,
        },
        f1_distribution,
        f1_mean,
        f1_stdev,
        test_size: split.test_idx.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(predictions: Vec<Vec<u32>>) -> PredictionRun {
        PredictionRun {
            test_idx: (0..predictions.len()).collect(),
            predictions,
            embedding_seed: 0,
            classifier_seed: 0,
        }
    }

    #[test]
    fn counts_agreeing_nodes() {
        let a = run((0..10).map(|u| vec![u % 2]).collect());
        assert_eq!(stable_core(&[a.clone(), a.clone()]).unwrap(), 1.0);
        let mut b = a.clone();
        for t in [1, 4, 7] {
            b.predictions[t] = vec![9];
        }
        assert!((stable_core(&[a.clone(), b.clone()]).unwrap() - 0.7).abs() < 1e-15);
        assert!(stable_core(&[a.clone()]).is_err());
        let mut c = a.clone();
        c.test_idx[0] = 99;
        assert!(stable_core(&[a, c]).is_err());
    }

    #[test]
    fn label_sets_must_match_exactly() {
        let a = run(vec![vec![0, 1], vec![2]]);
        let b = run(vec![vec![0], vec![2]]);
        assert_eq!(stable_core(&[a, b]).unwrap(), 0.5);
    }
}
