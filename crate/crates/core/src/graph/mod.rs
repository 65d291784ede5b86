//! Graphs in compressed sparse row form, plus everything that reads them
//! before any embedding is computed.

mod centrality;
mod generators;
mod io;
mod labels;
mod pairs;

pub use centrality::{coreness, degree, pagerank, CentralityKind, CentralityScores, PageRankParams};
pub use generators::{
    barabasi_albert_attachment, generate_barabasi_albert, generate_planted_partition,
    generate_watts_strogatz, watts_strogatz_ring_degree, GeneratorInfo,
};
pub use io::{load_edge_list, load_edge_list_dense, write_edge_list, IngestStats};
pub use labels::{load_labels, NodeLabels};
pub use pairs::{hop_distance_at_most, sample_node_pairs, NodePairSample, PairCategory, PairSamples};

use sha2::{Digest, Sha256};

/// Immutable sparse graph.
///
/// Neighbor lists are sorted ascending, contain no duplicates and no
/// self-loops. Undirected graphs store every edge in both directions with
/// equal weight; `edge_count` counts it once.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
    directed: bool,
    edge_count: usize,
    names: Option<Vec<String>>,
}

impl Graph {
    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn neighbors(&self, u: usize) -> &[u32] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn neighbor_weights(&self, u: usize) -> &[f64] {
        &self.weights[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    /// Sum of outgoing edge weights.
    pub fn weighted_degree(&self, u: usize) -> f64 {
        self.neighbor_weights(u).iter().sum()
    }

    /// Position of the arc `u -> v` in the flat arc arrays, if present.
    pub fn arc_index(&self, u: usize, v: usize) -> Option<usize> {
        self.neighbors(u)
            .binary_search(&(v as u32))
            .ok()
            .map(|i| self.offsets[u] + i)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.arc_index(u, v).is_some()
    }

    /// Number of stored arcs (twice `edge_count` for undirected graphs).
    pub fn arc_count(&self) -> usize {
        self.targets.len()
    }

    /// Iterates `(u, v, w)` over stored arcs in CSR order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .zip(self.neighbor_weights(u))
                .map(move |(&v, &w)| (u, v as usize, w))
        })
    }

    /// Iterates each edge once: arcs with `u < v` for undirected graphs,
    /// all arcs for directed ones.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let directed = self.directed;
        self.arcs().filter(move |&(u, v, _)| directed || u < v)
    }

    /// `|E| / (N (N - 1) / 2)` for undirected graphs, `|E| / (N (N - 1))`
    /// for directed ones.
    pub fn density(&self) -> f64 {
        let n = self.node_count() as f64;
        if n < 2.0 {
            return 0.0;
        }
        let pairs = if self.directed { n * (n - 1.0) } else { n * (n - 1.0) / 2.0 };
        self.edge_count as f64 / pairs
    }

    /// Original token of node `u` (its decimal id for generated graphs).
    pub fn node_name(&self, u: usize) -> String {
        match &self.names {
            Some(names) => names[u].clone(),
            None => u.to_string(),
        }
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// The graph with every arc mirrored and weights summed, or a clone
    /// when already undirected.
    pub fn undirected_projection(&self) -> Graph {
        if !self.directed {
            return self.clone();
        }
        let mut b = GraphBuilder::new(self.node_count(), false);
        for (u, v, w) in self.arcs() {
            b.add_edge(u, v, w);
        }
        let mut g = b.build().0;
        g.names = self.names.clone();
        g
    }

    /// Hex SHA-256 over the structure and weights.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.node_count() as u64).to_le_bytes());
        h.update([self.directed as u8]);
        for &o in &self.offsets {
            h.update((o as u64).to_le_bytes());
        }
        for &t in &self.targets {
            h.update(t.to_le_bytes());
        }
        for &w in &self.weights {
            h.update(w.to_bits().to_le_bytes());
        }
        hex(&h.finalize())
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Accumulates edges and produces a [`Graph`] satisfying all its invariants.
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    node_count: usize,
    directed: bool,
    edges: Vec<(u32, u32, f64)>,
    names: Option<Vec<String>>,
}

/// What [`GraphBuilder::build`] had to discard or merge.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub self_loops: usize,
    pub duplicates: usize,
}

impl GraphBuilder {
    pub fn new(node_count: usize, directed: bool) -> Self {
        assert!(node_count <= u32::MAX as usize, "node ids must fit in u32");
        Self {
            node_count,
            directed,
            edges: Vec::new(),
            names: None,
        }
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.node_count);
        self.names = Some(names);
        self
    }

    /// Panics when an endpoint is out of range or the weight is not a
    /// positive finite number.
    pub fn add_edge(&mut self, u: usize, v: usize, w: f64) {
        assert!(u < self.node_count && v < self.node_count, "edge ({u}, {v}) out of range");
        assert!(w.is_finite() && w > 0.0, "edge weight must be positive and finite");
        self.edges.push((u as u32, v as u32, w));
    }

    pub fn build(self) -> (Graph, BuildStats) {
        let mut stats = BuildStats::default();
        let mut arcs: Vec<(u32, u32, f64)> = Vec::with_capacity(self.edges.len() * 2);
        for (u, v, w) in self.edges {
            if u == v {
                stats.self_loops += 1;
                continue;
            }
            if self.directed {
                arcs.push((u, v, w));
            } else {
                // canonical orientation first so duplicates in either
                // direction collapse together
                let (a, b) = if u < v { (u, v) } else { (v, u) };
                arcs.push((a, b, w));
            }
        }
        arcs.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
        let mut merged: Vec<(u32, u32, f64)> = Vec::with_capacity(arcs.len());
        for (u, v, w) in arcs {
            match merged.last_mut() {
                Some(last) if last.0 == u && last.1 == v => {
                    last.2 += w;
                    stats.duplicates += 1;
                }
                _ => merged.push((u, v, w)),
            }
        }
        let edge_count = merged.len();
        if !self.directed {
            let mirrored: Vec<_> = merged.iter().map(|&(u, v, w)| (v, u, w)).collect();
            merged.extend(mirrored);
            merged.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
        }

        let mut offsets = vec![0usize; self.node_count + 1];
        for &(u, _, _) in &merged {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..self.node_count {
            offsets[i + 1] += offsets[i];
        }
        let targets = merged.iter().map(|e| e.1).collect();
        let weights = merged.iter().map(|e| e.2).collect();
        (
            Graph {
                offsets,
                targets,
                weights,
                directed: self.directed,
                edge_count,
                names: self.names,
            },
            stats,
        )
    }
}

impl Graph {
    /// Convenience constructor for unweighted edge lists.
    pub fn from_edges(node_count: usize, directed: bool, edges: &[(usize, usize)]) -> Graph {
        let mut b = GraphBuilder::new(node_count, directed);
        for &(u, v) in edges {
            b.add_edge(u, v, 1.0);
        }
        b.build().0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn undirected_storage_is_symmetric() {
        let g = Graph::from_edges(4, false, &[(0, 1), (2, 1), (3, 0), (1, 0)]);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.neighbors(0), &[1, 3]);
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert_eq!(g.neighbor_weights(0), &[2.0, 1.0]);
        assert_eq!(g.neighbor_weights(1)[0], 2.0);
        for (u, v, w) in g.arcs() {
            let back = g.arc_index(v, u).unwrap();
            assert_eq!(g.weights[back], w);
        }
        assert_eq!(g.edges().count(), 3);
    }

    #[test]
    fn directed_projection_merges_weights() {
        let g = Graph::from_edges(3, true, &[(0, 1), (1, 0), (1, 2)]);
        assert_eq!(g.edge_count(), 3);
        let p = g.undirected_projection();
        assert!(!p.is_directed());
        assert_eq!(p.edge_count(), 2);
        assert_eq!(p.neighbor_weights(0), &[2.0]);
    }

    #[test]
    fn digest_changes_with_weights() {
        let a = Graph::from_edges(3, false, &[(0, 1), (1, 2)]);
        let mut b = GraphBuilder::new(3, false);
        b.add_edge(0, 1, 1.0);
        b.add_edge(1, 2, 2.0);
        assert_ne!(a.digest(), b.build().0.digest());
        assert_eq!(a.digest(), a.clone().digest());
    }
}
