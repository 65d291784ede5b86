use std::collections::HashSet;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::rng::{self, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairCategory {
    OneHop,
    TwoHop,
    Distant,
}

impl PairCategory {
    pub const ALL: [PairCategory; 3] = [PairCategory::OneHop, PairCategory::TwoHop, PairCategory::Distant];

    pub fn name(self) -> &'static str {
        match self {
            PairCategory::OneHop => "one_hop",
            PairCategory::TwoHop => "two_hop",
            PairCategory::Distant => "distant",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodePairSample {
    pub category: PairCategory,
    /// Unordered pairs stored as `(min, max)`.
    pub pairs: Vec<(usize, usize)>,
    /// Set when the attempt budget ran out before the category filled.
    pub incomplete: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairSamples {
    pub one_hop: NodePairSample,
    pub two_hop: NodePairSample,
    pub distant: NodePairSample,
    pub attempts: usize,
}

impl PairSamples {
    pub fn categories(&self) -> [&NodePairSample; 3] {
        [&self.one_hop, &self.two_hop, &self.distant]
    }
}

/// Shortest-path distance between `u` and `v` if it is at most two, else
/// `None`. Equivalent to a breadth-first search cut off below depth three.
pub fn hop_distance_at_most(g: &Graph, u: usize, v: usize) -> Option<usize> {
    if u == v {
        return Some(0);
    }
    if g.has_edge(u, v) {
        return Some(1);
    }
    // a common neighbor exists iff the sorted lists intersect
    let (a, b) = (g.neighbors(u), g.neighbors(v));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return Some(2),
        }
    }
    None
}

/// Uniform rejection sampling of unordered node pairs, classified by hop
/// distance into one-hop, two-hop and distant (three or more hops, including
/// disconnected pairs). Directed graphs are classified on their undirected
/// projection. At most `1000 * count_per_category` candidates are drawn.
pub fn sample_node_pairs(g: &Graph, count_per_category: usize, seed: u64) -> PairSamples {
    let projected;
    let g = if g.is_directed() {
        projected = g.undirected_projection();
        &projected
    } else {
        g
    };
    let n = g.node_count();
    let mut buckets: [Vec<(usize, usize)>; 3] = Default::default();
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let budget = 1000usize.saturating_mul(count_per_category);
    let mut attempts = 0;
    let mut rng = rng::stream(seed, Stream::PairSampling);

    if n >= 2 {
        while attempts < budget && buckets.iter().any(|b| b.len() < count_per_category) {
            attempts += 1;
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n - 1);
            let v = if v >= u { v + 1 } else { v };
            let key = (u.min(v), u.max(v));
            if seen.contains(&key) {
                continue;
            }
            let slot = match hop_distance_at_most(g, key.0, key.1) {
                Some(1) => 0,
                Some(2) => 1,
                _ => 2,
            };
            if buckets[slot].len() < count_per_category {
                seen.insert(key);
                buckets[slot].push(key);
            }
        }
    }

    let [one, two, far] = buckets;
    let make = |category, pairs: Vec<(usize, usize)>| {
        let incomplete = pairs.len() < count_per_category;
        if incomplete {
            log::warn!(
                "only {} of {} {} pairs found within the attempt budget",
                pairs.len(),
                count_per_category,
                PairCategory::name(category)
            );
        }
        NodePairSample {
            category,
            pairs,
            incomplete,
        }
    };
    PairSamples {
        one_hop: make(PairCategory::OneHop, one),
        two_hop: make(PairCategory::TwoHop, two),
        distant: make(PairCategory::Distant, far),
        attempts,
    }
}
