//! Seeded random graph models.

use std::collections::HashSet;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{Graph, GraphBuilder, NodeLabels};
use crate::rng::{self, Stream};
use crate::{Error, Result};

/// Resolved generator parameters, kept so realized density is auditable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorInfo {
    pub model: String,
    pub n: usize,
    pub target_density: f64,
    /// `m` for Barabási–Albert, `k_ring` for Watts–Strogatz.
    pub resolved_param: usize,
    pub rewire_p: Option<f64>,
    pub realized_density: f64,
    pub edge_count: usize,
    pub seed: u64,
}

/// `round(density (n - 1) / 2)`, the attachment count giving roughly the
/// requested density.
pub fn barabasi_albert_attachment(n: usize, target_density: f64) -> usize {
    (target_density * (n as f64 - 1.0) / 2.0).round().max(0.0) as usize
}

/// Even ring degree `2 round(density (n - 1) / 2)`.
pub fn watts_strogatz_ring_degree(n: usize, target_density: f64) -> usize {
    2 * barabasi_albert_attachment(n, target_density)
}

/// Preferential attachment on a seed clique of `m + 1` nodes.
///
/// Every later node attaches to `m` distinct earlier nodes drawn with
/// probability proportional to their current degree, so
/// `|E| = m (m + 1) / 2 + (n - m - 1) m` exactly.
pub fn generate_barabasi_albert(n: usize, target_density: f64, seed: u64) -> Result<(Graph, GeneratorInfo)> {
    if n < 2 {
        return Err(Error::Config(format!("Barabási–Albert needs n >= 2, got {n}")));
    }
    let m = barabasi_albert_attachment(n, target_density);
    if m < 1 || m >= n {
        return Err(Error::Config(format!(
            "Barabási–Albert attachment count m = {m} (n = {n}, density = {target_density}) must satisfy 1 <= m < n"
        )));
    }
    let mut rng = rng::stream(seed, Stream::Generator);
    let mut b = GraphBuilder::new(n, false);
    // every edge endpoint once; uniform draws from it are degree-proportional
    let mut endpoints: Vec<u32> = Vec::with_capacity(2 * (m * (m + 1) / 2 + (n - m - 1) * m));
    for u in 0..=m {
        for v in u + 1..=m {
            b.add_edge(u, v, 1.0);
            endpoints.push(u as u32);
            endpoints.push(v as u32);
        }
    }
    let mut chosen: Vec<u32> = Vec::with_capacity(m);
    for new in m + 1..n {
        chosen.clear();
        while chosen.len() < m {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            b.add_edge(new, t as usize, 1.0);
            endpoints.push(new as u32);
            endpoints.push(t);
        }
    }
    let g = b.build().0;
    let info = GeneratorInfo {
        model: "barabasi_albert".into(),
        n,
        target_density,
        resolved_param: m,
        rewire_p: None,
        realized_density: g.density(),
        edge_count: g.edge_count(),
        seed,
    };
    Ok((g, info))
}

/// Ring lattice with `k_ring / 2` neighbors per side, then each lattice edge
/// `(i, i + j)` has its far endpoint moved with probability `rewire_p` to a
/// uniform node that is neither `i` nor already adjacent to it. Edge count
/// stays `n k_ring / 2`.
pub fn generate_watts_strogatz(
    n: usize,
    target_density: f64,
    rewire_p: f64,
    seed: u64,
) -> Result<(Graph, GeneratorInfo)> {
    if !(0.0..=1.0).contains(&rewire_p) {
        return Err(Error::Config(format!("rewiring probability {rewire_p} outside [0, 1]")));
    }
    let k = watts_strogatz_ring_degree(n, target_density);
    if k < 2 || k >= n {
        return Err(Error::Config(format!(
            "Watts–Strogatz ring degree k_ring = {k} (n = {n}, density = {target_density}) must satisfy 2 <= k_ring < n"
        )));
    }
    let mut rng = rng::stream(seed, Stream::Generator);
    let mut adj: Vec<HashSet<u32>> = vec![HashSet::with_capacity(k + 1); n];
    for i in 0..n {
        for j in 1..=k / 2 {
            let t = (i + j) % n;
            adj[i].insert(t as u32);
            adj[t].insert(i as u32);
        }
    }
    // same sweep order as the classic construction: by offset, then by node
    for j in 1..=k / 2 {
        for i in 0..n {
            if rng.random::<f64>() >= rewire_p {
                continue;
            }
            let old = ((i + j) % n) as u32;
            if !adj[i].contains(&old) {
                // already rewired away by an earlier step
                continue;
            }
            if adj[i].len() >= n - 1 {
                continue;
            }
            let target = loop {
                let w = rng.random_range(0..n) as u32;
                if w as usize != i && !adj[i].contains(&w) {
                    break w;
                }
            };
            adj[i].remove(&old);
            adj[old as usize].remove(&(i as u32));
            adj[i].insert(target);
            adj[target as usize].insert(i as u32);
        }
    }
    let mut b = GraphBuilder::new(n, false);
    for (u, set) in adj.iter().enumerate() {
        for &v in set {
            if (u as u32) < v {
                b.add_edge(u, v as usize, 1.0);
            }
        }
    }
    let g = b.build().0;
    let info = GeneratorInfo {
        model: "watts_strogatz".into(),
        n,
        target_density,
        resolved_param: k,
        rewire_p: Some(rewire_p),
        realized_density: g.density(),
        edge_count: g.edge_count(),
        seed,
    };
    Ok((g, info))
}

/// Planted-partition graph: `n` nodes split round-robin into `blocks`
/// classes, edges inside a class with probability `p_in` and across classes
/// with `p_out`. Returns the graph and its single-label class assignment.
pub fn generate_planted_partition(
    n: usize,
    blocks: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Result<(Graph, NodeLabels)> {
    if blocks == 0 || blocks > n {
        return Err(Error::Config(format!("need 1 <= blocks <= n, got {blocks} blocks for {n} nodes")));
    }
    for p in [p_in, p_out] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Config(format!("edge probability {p} outside [0, 1]")));
        }
    }
    let mut rng = rng::stream(seed, Stream::Generator);
    let mut b = GraphBuilder::new(n, false);
    for u in 0..n {
        for v in u + 1..n {
            let p = if u % blocks == v % blocks { p_in } else { p_out };
            if rng.random::<f64>() < p {
                b.add_edge(u, v, 1.0);
            }
        }
    }
    let assignments = (0..n).map(|u| vec![(u % blocks) as u32]).collect();
    let labels = NodeLabels::new(blocks, assignments, false)?;
    Ok((b.build().0, labels))
}
