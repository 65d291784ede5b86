use serde::{Deserialize, Serialize};

use super::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CentralityKind {
    Degree,
    Pagerank,
    Coreness,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentralityScores {
    pub kind: CentralityKind,
    pub values: Vec<f64>,
    /// Always true except for a PageRank run that hit `max_iter`.
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankParams {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PageRankParams {
    fn default() -> Self {
        Self {
            damping: 0.85,
            tol: 1e-10,
            max_iter: 200,
        }
    }
}

/// Out-degree (neighbor-list length).
pub fn degree(g: &Graph) -> CentralityScores {
    CentralityScores {
        kind: CentralityKind::Degree,
        values: (0..g.node_count()).map(|u| g.degree(u) as f64).collect(),
        converged: true,
        iterations: 0,
    }
}

/// Power iteration on the weight-normalized transition matrix with uniform
/// teleportation. Mass on dangling nodes is spread uniformly over all nodes.
/// Stops once the L1 change between iterates falls below `tol`.
pub fn pagerank(g: &Graph, params: PageRankParams) -> CentralityScores {
    let n = g.node_count();
    assert!(n >= 1, "pagerank of an empty graph");
    let nf = n as f64;
    let d = params.damping;
    let out_weight: Vec<f64> = (0..n).map(|u| g.weighted_degree(u)).collect();

    let mut x = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < params.max_iter {
        iterations += 1;
        let dangling: f64 = (0..n).filter(|&u| out_weight[u] == 0.0).map(|u| x[u]).sum();
        let base = (1.0 - d) / nf + d * dangling / nf;
        next.iter_mut().for_each(|v| *v = base);
        for u in 0..n {
            if out_weight[u] == 0.0 {
                continue;
            }
            let share = d * x[u] / out_weight[u];
            for (&v, &w) in g.neighbors(u).iter().zip(g.neighbor_weights(u)) {
                next[v as usize] += share * w;
            }
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= total);
        let change: f64 = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut next);
        if change < params.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("pagerank did not converge in {} iterations", params.max_iter);
    }
    CentralityScores {
        kind: CentralityKind::Pagerank,
        values: x,
        converged,
        iterations,
    }
}

/// k-core number of every node by bucketed minimum-degree peeling.
/// Directed graphs are read through their undirected projection.
pub fn coreness(g: &Graph) -> CentralityScores {
    let projected;
    let g = if g.is_directed() {
        projected = g.undirected_projection();
        &projected
    } else {
        g
    };
    let n = g.node_count();
    let mut deg: Vec<usize> = (0..n).map(|u| g.degree(u)).collect();
    let max_deg = deg.iter().copied().max().unwrap_or(0);

    // nodes sorted by degree, with bucket starts and each node's position
    let mut bin = vec![0usize; max_deg + 2];
    for &d in &deg {
        bin[d + 1] += 1;
    }
    for d in 0..=max_deg {
        bin[d + 1] += bin[d];
    }
    let mut pos = vec![0usize; n];
    let mut order = vec![0usize; n];
    let mut fill = bin.clone();
    for u in 0..n {
        pos[u] = fill[deg[u]];
        order[pos[u]] = u;
        fill[deg[u]] += 1;
    }

    for i in 0..n {
        let u = order[i];
        for &v in g.neighbors(u) {
            let v = v as usize;
            if deg[v] > deg[u] {
                // move v to the front of its bucket, then shrink it by one
                let dv = deg[v];
                let front = bin[dv];
                let w = order[front];
                if w != v {
                    order.swap(pos[v], front);
                    pos[w] = pos[v];
                    pos[v] = front;
                }
                bin[dv] += 1;
                deg[v] -= 1;
            }
        }
    }
    CentralityScores {
        kind: CentralityKind::Coreness,
        values: deg.into_iter().map(|d| d as f64).collect(),
        converged: true,
        iterations: 0,
    }
}
