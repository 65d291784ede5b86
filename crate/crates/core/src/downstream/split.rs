use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::graph::NodeLabels;
use crate::rng::{self, Stream};
use crate::{Error, Result};

/// Train/test partition of the labeled nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    /// Ascending node ids.
    pub train_idx: Vec<usize>,
    /// Ascending node ids.
    pub test_idx: Vec<usize>,
    pub seed: u64,
    /// Train share, stored as given.
    pub fraction: f64,
    pub stratified: bool,
}

/// Seeded split with `⌈fraction · n⌉` training nodes. Single-label splits are
/// stratified: each class gets its proportional share, rounded by largest
/// remainder so the total stays exact. Falls back to a plain shuffle (with a
/// warning) when some class has fewer than two members.
pub fn make_split(labels: &NodeLabels, fraction: f64, seed: u64) -> Result<SplitSpec> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Config(format!("train fraction {fraction} outside (0, 1)")));
    }
    let mut nodes = labels.labeled_nodes();
    let n = nodes.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!("need at least 2 labeled nodes, got {n}")));
    }
    let mut rng = rng::stream(seed, Stream::Split);
    nodes.shuffle(&mut rng);
    let train_total = ((fraction * n as f64).ceil() as usize).min(n - 1);

    let mut classes: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    if !labels.is_multi_label() {
        for &u in &nodes {
            classes.entry(labels.class_of(u).expect("single-label node")).or_default().push(u);
        }
    }
    let stratified = !classes.is_empty() && classes.values().all(|m| m.len() >= 2);
    if !labels.is_multi_label() && !stratified {
        log::warn!("a class has fewer than 2 labeled nodes; splitting without stratification");
    }

    let (mut train, mut test) = if stratified {
        let quotas = apportion(&classes.values().map(Vec::len).collect::<Vec<_>>(), train_total);
        let mut train = Vec::with_capacity(train_total);
        let mut test = Vec::with_capacity(n - train_total);
        for (members, q) in classes.values().zip(quotas) {
            train.extend_from_slice(&members[..q]);
            test.extend_from_slice(&members[q..]);
        }
        (train, test)
    } else {
        (nodes[..train_total].to_vec(), nodes[train_total..].to_vec())
    };
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitSpec {
        train_idx: train,
        test_idx: test,
        seed,
        fraction,
        stratified,
    })
}

/// Splits `total` across groups proportionally to `sizes` by largest
/// remainder, ties to the lower index.
fn apportion(sizes: &[usize], total: usize) -> Vec<usize> {
    let n: usize = sizes.iter().sum();
    let exact: Vec<f64> = sizes.iter().map(|&s| s as f64 * total as f64 / n as f64).collect();
    let mut quota: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())).then(a.cmp(&b)));
    let mut left = total - quota.iter().sum::<usize>();
    for &g in order.iter().cycle().take(order.len() * 2) {
        if left == 0 {
            break;
        }
        if quota[g] < sizes[g] {
            quota[g] += 1;
            left -= 1;
        }
    }
    quota
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_classes(per: usize) -> NodeLabels {
        NodeLabels::new(2, (0..2 * per).map(|u| vec![(u % 2) as u32]).collect(), false).unwrap()
    }

    #[test]
    fn seventy_five_twenty_five() {
        let s = make_split(&two_classes(50), 0.75, 1).unwrap();
        assert_eq!((s.train_idx.len(), s.test_idx.len()), (75, 25));
        assert!(s.stratified);
        let even = s.train_idx.iter().filter(|&&u| u % 2 == 0).count();
        assert!((37..=38).contains(&even));
        assert_eq!(s, make_split(&two_classes(50), 0.75, 1).unwrap());
        assert_ne!(s.train_idx, make_split(&two_classes(50), 0.75, 2).unwrap().train_idx);
    }

    #[test]
    fn disjoint_and_exhaustive_over_labeled_nodes() {
        let mut sets: Vec<Vec<u32>> = (0..40).map(|u| vec![(u % 3) as u32]).collect();
        sets[5].clear();
        let labels = NodeLabels::new(3, sets, false).unwrap();
        let s = make_split(&labels, 0.5, 4).unwrap();
        let mut all: Vec<usize> = s.train_idx.iter().chain(&s.test_idx).copied().collect();
        all.sort_unstable();
        assert_eq!(all, labels.labeled_nodes());
    }

    #[test]
    fn singleton_class_falls_back() {
        let mut sets: Vec<Vec<u32>> = (0..10).map(|_| vec![0]).collect();
        sets[3] = vec![1];
        let s = make_split(&NodeLabels::new(2, sets, false).unwrap(), 0.75, 0).unwrap();
        assert!(!s.stratified);
        assert_eq!(s.train_idx.len(), 8);
    }

    #[test]
    fn apportionment_is_exact() {
        assert_eq!(apportion(&[50, 50], 75).iter().sum::<usize>(), 75);
        assert_eq!(apportion(&[3, 3, 4], 5).iter().sum::<usize>(), 5);
        assert_eq!(apportion(&[1, 9], 9), vec![1, 8]);
    }

    #[test]
    fn too_few_nodes() {
        let labels = NodeLabels::new(1, vec![vec![0], vec![]], false).unwrap();
        assert!(make_split(&labels, 0.75, 0).is_err());
    }
}
