use std::cmp::Ordering;

use rayon::prelude::*;

use crate::linalg::{row_normalize, DenseMatrix};
use crate::{Error, Result};

const ROW_BLOCK: usize = 256;

/// Exact cosine k nearest neighbors of every node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnnTable {
    pub k: usize,
    /// Neighbor ids by descending similarity, ties by ascending id. Empty for
    /// zero rows.
    pub neighbors: Vec<Vec<u32>>,
    /// Rows with zero norm: excluded as candidates and given no neighbors.
    pub zero_rows: Vec<bool>,
}

impl KnnTable {
    pub fn node_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn of(&self, u: usize) -> &[u32] {
        &self.neighbors[u]
    }
}

/// Descending similarity, then ascending id.
#[inline]
pub(crate) fn rank_order(a: (f64, u32), b: (f64, u32)) -> Ordering {
    b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1))
}

pub fn knn(z: &DenseMatrix, k: usize) -> Result<KnnTable> {
    let (normalized, zero_rows) = row_normalize(z);
    knn_normalized(&normalized, &zero_rows, k)
}

/// [`knn`] on rows that are already unit length (or zero, as marked).
pub fn knn_normalized(normalized: &DenseMatrix, zero_rows: &[bool], k: usize) -> Result<KnnTable> {
    if k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    let n = normalized.rows();
    if zero_rows.iter().all(|&z| z) {
        return Err(Error::InsufficientData("every embedding row is zero".into()));
    }
    let candidates: Vec<u32> = (0..n as u32).filter(|&j| !zero_rows[j as usize]).collect();
    let blocks: Vec<usize> = (0..n).step_by(ROW_BLOCK).collect();
    let neighbors: Vec<Vec<u32>> = blocks
        .par_iter()
        .flat_map_iter(|&start| {
            let end = (start + ROW_BLOCK).min(n);
            let block = DenseMatrix::from_fn(end - start, normalized.cols(), |i, j| normalized[(start + i, j)]);
            let sims = block.matmul_t(normalized);
            let mut scratch: Vec<(f64, u32)> = Vec::with_capacity(candidates.len());
            (start..end)
                .map(|i| {
                    if zero_rows[i] {
                        return Vec::new();
                    }
                    let row = sims.row(i - start);
                    scratch.clear();
                    scratch.extend(
                        candidates
                            .iter()
                            .filter(|&&j| j as usize != i)
                            .map(|&j| (row[j as usize], j)),
                    );
                    top_k(&mut scratch, k)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(KnnTable {
        k,
        neighbors,
        zero_rows: zero_rows.to_vec(),
    })
}

fn top_k(items: &mut [(f64, u32)], k: usize) -> Vec<u32> {
    let k = k.min(items.len());
    if k == 0 {
        return Vec::new();
    }
    if k < items.len() {
        items.select_nth_unstable_by(k - 1, |a, b| rank_order(*a, *b));
    }
    let head = &mut items[..k];
    head.sort_unstable_by(|a, b| rank_order(*a, *b));
    head.iter().map(|&(_, j)| j).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormal_rows_break_ties_by_id() {
        let t = knn(&DenseMatrix::identity(4), 1).unwrap();
        assert_eq!(t.neighbors, vec![vec![1], vec![0], vec![0], vec![0]]);
        let t = knn(&DenseMatrix::identity(4), 10).unwrap();
        assert_eq!(t.of(2), &[0, 1, 3]);
    }

    #[test]
    fn planar_angles() {
        let deg = |a: f64| vec![a.to_radians().cos(), a.to_radians().sin()];
        let z = DenseMatrix::from_rows(&[deg(0.0), deg(10.0), deg(90.0)]).unwrap();
        let t = knn(&z, 1).unwrap();
        assert_eq!(t.of(0), &[1]);
        assert_eq!(t.of(1), &[0]);
        assert_eq!(t.of(2), &[1]);
    }

    #[test]
    fn zero_rows_are_excluded() {
        let z = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let t = knn(&z, 2).unwrap();
        assert!(t.zero_rows[1]);
        assert!(t.of(1).is_empty());
        assert_eq!(t.of(0), &[2]);
        assert!(knn(&DenseMatrix::zeros(3, 2), 1).is_err());
        assert!(knn(&z, 0).is_err());
    }
}
