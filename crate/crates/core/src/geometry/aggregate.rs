use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::measures::{Measure, PairwiseNodeScores};
use crate::graph::{CentralityKind, CentralityScores};
use crate::{Error, Result};

/// Tukey letter values: the median and the lower/upper values at depths
/// 1/4, 1/8 and 1/16.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LetterValues {
    pub median: f64,
    pub fourths: (f64, f64),
    pub eighths: (f64, f64),
    pub sixteenths: (f64, f64),
}

/// Letter values of `values`. Each depth is `(⌊previous⌋ + 1) / 2`, starting
/// from `(n + 1) / 2` for the median; half-integer depths average their two
/// neighbors.
pub fn letter_values(values: &[f64]) -> Option<LetterValues> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let at = |depth: f64| -> (f64, f64) {
        let lo = depth.floor() as usize;
        let hi = depth.ceil() as usize;
        let lower = (sorted[lo - 1] + sorted[hi - 1]) / 2.0;
        let upper = (sorted[n - lo] + sorted[n - hi]) / 2.0;
        (lower, upper)
    };
    let d1 = (n as f64 + 1.0) / 2.0;
    let d2 = (d1.floor() + 1.0) / 2.0;
    let d3 = (d2.floor() + 1.0) / 2.0;
    let d4 = (d3.floor() + 1.0) / 2.0;
    Some(LetterValues {
        median: at(d1).0,
        fourths: at(d2),
        eighths: at(d3),
        sixteenths: at(d4),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    /// Mean centrality of the nodes in the window.
    pub centrality: f64,
    pub score: f64,
}

/// Per-node scores against centrality: nodes sorted by ascending centrality
/// (ties by id), smoothed with a sliding mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityProfile {
    pub kind: CentralityKind,
    pub window: usize,
    pub points: Vec<ProfilePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub measure: Measure,
    pub run_count: usize,
    pub pair_count: usize,
    pub node_count: usize,
    /// Mean over pairs with a defined value; `None` when there was none.
    pub per_node_mean: Vec<Option<f64>>,
    /// Nodes without any defined value, left out of everything below.
    pub excluded_nodes: usize,
    /// Individual (pair, node) values that were undefined.
    pub undefined_values: usize,
    pub grand_mean: f64,
    pub quantiles: LetterValues,
    pub profiles: Vec<CentralityProfile>,
}

pub fn moving_average_window(n: usize, window_fraction: f64) -> usize {
    20usize.max((window_fraction * n as f64).ceil() as usize)
}

/// Averages per-node scores over all run pairs and summarizes them.
pub fn aggregate(scores: &[PairwiseNodeScores], centralities: &[&CentralityScores], window_fraction: f64) -> Result<StabilityReport> {
    let first = scores
        .first()
        .ok_or_else(|| Error::InsufficientData("no pairwise scores to aggregate".into()))?;
    let n = first.node_count();
    let mut pairs = HashSet::new();
    let mut runs = HashSet::new();
    for s in scores {
        if s.measure != first.measure || s.node_count() != n {
            return Err(Error::Shape(format!(
                "cannot aggregate {} over {} nodes with {} over {n}",
                s.measure.name(),
                s.node_count(),
                first.measure.name()
            )));
        }
        let (l, m) = s.run_pair;
        if !pairs.insert((l.min(m), l.max(m))) {
            return Err(Error::Config(format!("run pair {:?} appears twice", s.run_pair)));
        }
        runs.insert(l);
        runs.insert(m);
    }
    let mut undefined_values = 0;
    let per_node_mean: Vec<Option<f64>> = (0..n)
        .map(|u| {
            let (mut sum, mut count) = (0.0, 0usize);
            for s in scores {
                if s.undefined[u] {
                    undefined_values += 1;
                } else {
                    sum += s.values[u];
                    count += 1;
                }
            }
            (count > 0).then(|| sum / count as f64)
        })
        .collect();
    let defined: Vec<f64> = per_node_mean.iter().flatten().copied().collect();
    let quantiles = letter_values(&defined)
        .ok_or_else(|| Error::InsufficientData("every node score is undefined".into()))?;
    let grand_mean = defined.iter().sum::<f64>() / defined.len() as f64;
    let profiles = centralities
        .iter()
        .map(|c| centrality_profile(&per_node_mean, c, window_fraction))
        .collect::<Result<_>>()?;
    Ok(StabilityReport {
        measure: first.measure,
        run_count: runs.len(),
        pair_count: pairs.len(),
        node_count: n,
        excluded_nodes: n - defined.len(),
        undefined_values,
        per_node_mean,
        grand_mean,
        quantiles,
        profiles,
    })
}

pub fn centrality_profile(per_node: &[Option<f64>], c: &CentralityScores, window_fraction: f64) -> Result<CentralityProfile> {
    if c.values.len() != per_node.len() {
        return Err(Error::Shape(format!(
            "{} centrality values for {} nodes",
            c.values.len(),
            per_node.len()
        )));
    }
    let mut order: Vec<(f64, f64)> = per_node
        .iter()
        .zip(&c.values)
        .filter_map(|(s, &x)| s.map(|s| (x, s)))
        .collect();
    // stable sort keeps ascending ids among ties
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    let window = moving_average_window(per_node.len(), window_fraction).min(order.len()).max(1);
    let mut points = Vec::with_capacity(order.len().saturating_sub(window) + 1);
    if !order.is_empty() {
        let (mut cx, mut sy) = (0.0, 0.0);
        for (i, &(x, y)) in order.iter().enumerate() {
            cx += x;
            sy += y;
            if i >= window {
                cx -= order[i - window].0;
                sy -= order[i - window].1;
            }
            if i + 1 >= window {
                // recompute exactly every so often to keep drift out of the sums
                let (x, y) = if (i + 1 - window) % 1024 == 0 {
                    let slice = &order[i + 1 - window..=i];
                    cx = slice.iter().map(|p| p.0).sum();
                    sy = slice.iter().map(|p| p.1).sum();
                    (cx, sy)
                } else {
                    (cx, sy)
                };
                points.push(ProfilePoint {
                    centrality: x / window as f64,
                    score: y / window as f64,
                });
            }
        }
    }
    Ok(CentralityProfile {
        kind: c.kind,
        window,
        points,
    })
}
