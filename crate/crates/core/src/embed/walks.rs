//! Biased second-order random walks.

use rand::seq::SliceRandom;

use super::{AliasTable, Node2vecConfig};
use crate::graph::Graph;
use crate::rng::{self, Stream};

/// Unnormalized weights for stepping from `cur` (having arrived from `prev`)
/// to each neighbor of `cur`, in neighbor-list order: edge weight times
/// `1/p` for returning to `prev`, `1` for neighbors of `prev`, `1/q`
/// otherwise.
pub fn transition_weights(g: &Graph, prev: usize, cur: usize, p: f64, q: f64) -> Vec<f64> {
    g.neighbors(cur)
        .iter()
        .zip(g.neighbor_weights(cur))
        .map(|(&x, &w)| {
            let x = x as usize;
            if x == prev {
                w / p
            } else if g.has_edge(x, prev) {
                w
            } else {
                w / q
            }
        })
        .collect()
}

struct Walker<'g> {
    g: &'g Graph,
    p: f64,
    q: f64,
    first_order: Vec<Option<AliasTable>>,
    /// Per-arc tables for `(prev -> cur)`, built on first use.
    second_order: Vec<Option<AliasTable>>,
    unbiased: bool,
}

impl<'g> Walker<'g> {
    fn new(g: &'g Graph, p: f64, q: f64) -> Self {
        let first_order = (0..g.node_count())
            .map(|u| (g.degree(u) > 0).then(|| AliasTable::new(g.neighbor_weights(u)).expect("positive weights")))
            .collect();
        let unbiased = p == 1.0 && q == 1.0;
        Self {
            g,
            p,
            q,
            first_order,
            second_order: if unbiased { Vec::new() } else { vec![None; g.arc_count()] },
            unbiased,
        }
    }

    fn walk(&mut self, start: usize, length: usize, rng: &mut rng::Rng, out: &mut Vec<u32>) {
        out.clear();
        out.push(start as u32);
        let mut prev: Option<usize> = None;
        let mut cur = start;
        while out.len() < length {
            let Some(first) = &self.first_order[cur] else { break };
            let idx = match prev {
                Some(pv) if !self.unbiased => {
                    let arc = self.g.arc_index(pv, cur).expect("walk follows stored arcs");
                    let table = self.second_order[arc].get_or_insert_with(|| {
                        AliasTable::new(&transition_weights(self.g, pv, cur, self.p, self.q)).expect("positive weights")
                    });
                    table.sample(rng)
                }
                _ => first.sample(rng),
            };
            let next = self.g.neighbors(cur)[idx] as usize;
            out.push(next as u32);
            prev = Some(cur);
            cur = next;
        }
    }
}

/// `walks_per_node` rounds; each round visits every node once in a freshly
/// shuffled order and starts one walk of up to `walk_length` nodes there.
/// Walks stop early at nodes without outgoing edges, so isolated nodes yield
/// length-1 walks.
pub fn random_walks(g: &Graph, cfg: &Node2vecConfig, seed: u64) -> Vec<Vec<u32>> {
    let mut rng = rng::stream(seed, Stream::Walks);
    let mut walker = Walker::new(g, cfg.p, cfg.q);
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    let mut walks = Vec::with_capacity(cfg.walks_per_node * g.node_count());
    let mut buf = Vec::with_capacity(cfg.walk_length);
    for _ in 0..cfg.walks_per_node {
        order.shuffle(&mut rng);
        for &start in &order {
            walker.walk(start, cfg.walk_length, &mut rng, &mut buf);
            walks.push(buf.clone());
        }
    }
    walks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn biased_weights_on_a_path() {
        let g = Graph::from_edges(3, false, &[(0, 1), (1, 2)]);
        let w = transition_weights(&g, 0, 1, 0.25, 4.0);
        let total: f64 = w.iter().sum();
        assert!((w[0] / total - 16.0 / 17.0).abs() < 1e-12);
        assert!((w[1] / total - 1.0 / 17.0).abs() < 1e-12);
    }

    #[test]
    fn unbiased_walk_on_triangle_is_uniform() {
        let g = Graph::from_edges(3, false, &[(0, 1), (1, 2), (0, 2)]);
        let cfg = Node2vecConfig {
            walks_per_node: 1,
            walk_length: 100_001,
            ..Default::default()
        };
        let walks = random_walks(&g, &cfg, 3);
        let walk = &walks[0];
        // count how often the walk turns "forward" (u -> u+1 mod 3)
        let forward = walk.windows(2).filter(|w| (w[0] + 1) % 3 == w[1]).count();
        let steps = walk.len() - 1;
        assert_eq!(steps, 100_000);
        assert!((forward as f64 / steps as f64 - 0.5).abs() < 0.01);
        assert!(walk.windows(2).all(|w| w[0] != w[1]));
    }

    #[test]
    fn biased_walk_frequencies_on_a_path() {
        let g = Graph::from_edges(3, false, &[(0, 1), (1, 2)]);
        let cfg = Node2vecConfig {
            p: 0.25,
            q: 4.0,
            walks_per_node: 20_000,
            walk_length: 3,
            ..Default::default()
        };
        let walks = random_walks(&g, &cfg, 5);
        let from_zero: Vec<_> = walks.iter().filter(|w| w[0] == 0).collect();
        let back = from_zero.iter().filter(|w| w[2] == 0).count() as f64 / from_zero.len() as f64;
        assert!((back - 16.0 / 17.0).abs() < 0.01, "{back}");
    }

    #[test]
    fn walk_counts_and_starts() {
        let g = Graph::from_edges(5, false, &[(0, 1), (1, 2), (2, 3)]);
        let cfg = Node2vecConfig {
            walks_per_node: 4,
            walk_length: 6,
            ..Default::default()
        };
        let walks = random_walks(&g, &cfg, 1);
        assert_eq!(walks.len(), 20);
        for u in 0..5u32 {
            assert_eq!(walks.iter().filter(|w| w[0] == u).count(), 4);
        }
        for w in &walks {
            if w[0] == 4 {
                assert_eq!(w.len(), 1);
            } else {
                assert_eq!(w.len(), 6);
                assert!(w.windows(2).all(|s| g.has_edge(s[0] as usize, s[1] as usize)));
            }
        }
        assert_eq!(walks, random_walks(&g, &cfg, 1));
        assert_ne!(walks, random_walks(&g, &cfg, 2));
    }
}
