use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::knn::{knn_normalized, KnnTable};
use crate::linalg::{cosine, dot, procrustes_align, row_normalize, DenseMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    AlignedCos,
    KnnJaccard,
    SecondOrderCos,
}

impl Measure {
    pub const ALL: [Measure; 3] = [Measure::AlignedCos, Measure::KnnJaccard, Measure::SecondOrderCos];

    pub fn name(self) -> &'static str {
        match self {
            Measure::AlignedCos => "aligned_cos",
            Measure::KnnJaccard => "knn_jaccard",
            Measure::SecondOrderCos => "second_order_cos",
        }
    }
}

impl std::str::FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown measure {s:?}")))
    }
}

/// One measure evaluated node by node on one pair of runs.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseNodeScores {
    pub measure: Measure,
    pub run_pair: (usize, usize),
    /// Undefined entries hold 0.
    pub values: Vec<f64>,
    pub undefined: Vec<bool>,
}

impl PairwiseNodeScores {
    pub fn node_count(&self) -> usize {
        self.values.len()
    }

    pub fn with_pair(mut self, l: usize, m: usize) -> Self {
        self.run_pair = (l, m);
        self
    }

    pub fn defined_mean(&self) -> Option<f64> {
        let (sum, n) = self
            .values
            .iter()
            .zip(&self.undefined)
            .filter(|(_, &u)| !u)
            .fold((0.0, 0usize), |(s, n), (v, _)| (s + v, n + 1));
        (n > 0).then(|| sum / n as f64)
    }
}

fn check_shapes(a: &DenseMatrix, b: &DenseMatrix) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::Shape(format!(
            "embeddings of shape {:?} and {:?} cannot be compared",
            a.shape(),
            b.shape()
        )));
    }
    Ok(())
}

fn center_columns(z: &DenseMatrix) -> DenseMatrix {
    let (n, d) = z.shape();
    let mut mean = vec![0.0; d];
    for i in 0..n {
        for (m, v) in mean.iter_mut().zip(z.row(i)) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n.max(1) as f64);
    DenseMatrix::from_fn(n, d, |i, j| z[(i, j)] - mean[j])
}

/// Cosine similarity of each node's vectors after orthogonally aligning the
/// first (row-normalized) embedding onto the second.
pub fn aligned_cosine_similarity(zl: &DenseMatrix, zm: &DenseMatrix, center: bool) -> Result<PairwiseNodeScores> {
    check_shapes(zl, zm)?;
    let prep = |z: &DenseMatrix| if center { row_normalize(&center_columns(z)) } else { row_normalize(z) };
    let (a, za) = prep(zl);
    let (b, zb) = prep(zm);
    aligned_cosine_normalized(&a, &za, &b, &zb)
}

pub(crate) fn aligned_cosine_normalized(a: &DenseMatrix, za: &[bool], b: &DenseMatrix, zb: &[bool]) -> Result<PairwiseNodeScores> {
    let align = procrustes_align(a, b)?;
    if align.degenerate {
        log::warn!("Procrustes cross product is rank deficient; alignment is not unique");
    }
    let rotated = a.matmul(&align.q);
    let n = a.rows();
    let mut values = vec![0.0; n];
    let mut undefined = vec![false; n];
    for i in 0..n {
        if za[i] || zb[i] {
            undefined[i] = true;
        } else {
            values[i] = cosine(rotated.row(i), b.row(i)).clamp(-1.0, 1.0);
        }
    }
    Ok(PairwiseNodeScores {
        measure: Measure::AlignedCos,
        run_pair: (0, 1),
        values,
        undefined,
    })
}

/// Jaccard index of each node's two neighbor sets.
pub fn jaccard_from_tables(tl: &KnnTable, tm: &KnnTable) -> Result<PairwiseNodeScores> {
    if tl.node_count() != tm.node_count() {
        return Err(Error::Shape(format!("k-NN tables over {} and {} nodes", tl.node_count(), tm.node_count())));
    }
    let n = tl.node_count();
    let mut values = vec![0.0; n];
    let mut undefined = vec![false; n];
    for u in 0..n {
        let (a, b) = (tl.of(u), tm.of(u));
        if a.is_empty() || b.is_empty() {
            undefined[u] = true;
            continue;
        }
        let common = a.iter().filter(|x| b.contains(x)).count();
        values[u] = common as f64 / (a.len() + b.len() - common) as f64;
    }
    Ok(PairwiseNodeScores {
        measure: Measure::KnnJaccard,
        run_pair: (0, 1),
        values,
        undefined,
    })
}

pub fn knn_jaccard(zl: &DenseMatrix, zm: &DenseMatrix, k: usize) -> Result<PairwiseNodeScores> {
    check_shapes(zl, zm)?;
    check_k(zl.rows(), k)?;
    jaccard_from_tables(&super::knn(zl, k)?, &super::knn(zm, k)?)
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k >= n {
        return Err(Error::Config(format!("k = {k} must lie in 1..{n}")));
    }
    Ok(())
}

/// Cosine between the similarity profiles of a node over the union of its two
/// neighbor sets, ordered by ascending id.
pub fn second_order_from_parts(a: &PreparedEmbedding, b: &PreparedEmbedding) -> Result<PairwiseNodeScores> {
    let (tl, tm) = (a.knn()?, b.knn()?);
    if a.normalized.shape() != b.normalized.shape() {
        return Err(Error::Shape("second-order cosine needs equally shaped embeddings".into()));
    }
    let n = a.normalized.rows();
    let mut values = vec![0.0; n];
    let mut undefined = vec![false; n];
    let mut union: Vec<u32> = Vec::new();
    let (mut sl, mut sm) = (Vec::new(), Vec::new());
    for i in 0..n {
        union.clear();
        union.extend_from_slice(tl.of(i));
        union.extend_from_slice(tm.of(i));
        union.sort_unstable();
        union.dedup();
        sl.clear();
        sm.clear();
        for &u in &union {
            sl.push(dot(a.normalized.row(i), a.normalized.row(u as usize)));
            sm.push(dot(b.normalized.row(i), b.normalized.row(u as usize)));
        }
        let nl = dot(&sl, &sl);
        let nm = dot(&sm, &sm);
        if nl == 0.0 || nm == 0.0 {
            undefined[i] = true;
        } else {
            values[i] = (dot(&sl, &sm) / (nl.sqrt() * nm.sqrt())).clamp(-1.0, 1.0);
        }
    }
    Ok(PairwiseNodeScores {
        measure: Measure::SecondOrderCos,
        run_pair: (0, 1),
        values,
        undefined,
    })
}

pub fn second_order_cosine(zl: &DenseMatrix, zm: &DenseMatrix, k: usize) -> Result<PairwiseNodeScores> {
    check_shapes(zl, zm)?;
    check_k(zl.rows(), k)?;
    second_order_from_parts(&PreparedEmbedding::new(zl, Some(k))?, &PreparedEmbedding::new(zm, Some(k))?)
}

/// Row-normalized embedding with its k-NN table, computed once per run and
/// shared across all pairs it takes part in.
#[derive(Debug, Clone)]
pub struct PreparedEmbedding {
    pub normalized: DenseMatrix,
    pub zero_rows: Vec<bool>,
    pub knn: Option<KnnTable>,
}

impl PreparedEmbedding {
    pub fn new(z: &DenseMatrix, k: Option<usize>) -> Result<Self> {
        let (normalized, zero_rows) = row_normalize(z);
        let knn = k.map(|k| knn_normalized(&normalized, &zero_rows, k)).transpose()?;
        Ok(Self {
            normalized,
            zero_rows,
            knn,
        })
    }

    fn knn(&self) -> Result<&KnnTable> {
        self.knn
            .as_ref()
            .ok_or_else(|| Error::Config("k-NN table was not computed for this embedding".into()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareOptions {
    pub measures: Vec<Measure>,
    pub k: usize,
    pub center: bool,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            measures: Measure::ALL.to_vec(),
            k: 20,
            center: false,
        }
    }
}

/// All `(l, m)` with `l < m < r`, in lexicographic order.
pub fn run_pairs(r: usize) -> Vec<(usize, usize)> {
    (0..r).flat_map(|l| (l + 1..r).map(move |m| (l, m))).collect()
}

/// Every configured measure on every pair of runs. Output is ordered by run
/// pair, then by the order of `opts.measures`, whatever the thread count.
pub fn compare_runs(runs: &[&DenseMatrix], opts: &CompareOptions) -> Result<Vec<PairwiseNodeScores>> {
    if runs.len() < 2 {
        return Err(Error::InsufficientData(format!("need at least 2 runs, got {}", runs.len())));
    }
    let shape = runs[0].shape();
    let offenders: Vec<usize> = (0..runs.len()).filter(|&i| runs[i].shape() != shape).collect();
    if !offenders.is_empty() {
        return Err(Error::Shape(format!("runs {offenders:?} differ in shape from run 0 {shape:?}")));
    }
    let needs_knn = opts.measures.iter().any(|m| *m != Measure::AlignedCos);
    if needs_knn {
        check_k(shape.0, opts.k)?;
    }
    let prepared: Vec<PreparedEmbedding> = runs
        .par_iter()
        .map(|z| PreparedEmbedding::new(z, needs_knn.then_some(opts.k)))
        .collect::<Result<_>>()?;
    let centered: Option<Vec<(DenseMatrix, Vec<bool>)>> = (opts.center && opts.measures.contains(&Measure::AlignedCos))
        .then(|| runs.par_iter().map(|z| row_normalize(&center_columns(z))).collect());
    let jobs: Vec<((usize, usize), Measure)> = run_pairs(runs.len())
        .into_iter()
        .flat_map(|p| opts.measures.iter().map(move |&m| (p, m)))
        .collect();
    jobs.par_iter()
        .map(|&((l, m), measure)| {
            let (a, b) = (&prepared[l], &prepared[m]);
            let scores = match measure {
                Measure::AlignedCos => match &centered {
                    Some(c) => aligned_cosine_normalized(&c[l].0, &c[l].1, &c[m].0, &c[m].1)?,
                    None => aligned_cosine_normalized(&a.normalized, &a.zero_rows, &b.normalized, &b.zero_rows)?,
                },
                Measure::KnnJaccard => jaccard_from_tables(a.knn()?, b.knn()?)?,
                Measure::SecondOrderCos => second_order_from_parts(a, b)?,
            };
            Ok(scores.with_pair(l, m))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn jaccard_of_overlapping_sets() {
        let table = |sets: Vec<Vec<u32>>| KnnTable {
            k: 3,
            zero_rows: vec![false; sets.len()],
            neighbors: sets,
        };
        let s = jaccard_from_tables(&table(vec![vec![1, 2, 3]]), &table(vec![vec![2, 3, 4]])).unwrap();
        assert_eq!(s.values, vec![0.5]);
        let s = jaccard_from_tables(&table(vec![vec![1, 2, 3]]), &table(vec![vec![4, 5, 6]])).unwrap();
        assert_eq!(s.values, vec![0.0]);
    }

    #[test]
    fn identical_embeddings_score_one() {
        let z = DenseMatrix::from_fn(30, 4, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0 + 0.1 * j as f64);
        for s in [
            aligned_cosine_similarity(&z, &z, false).unwrap(),
            knn_jaccard(&z, &z, 5).unwrap(),
            second_order_cosine(&z, &z, 5).unwrap(),
        ] {
            for v in &s.values {
                assert_abs_diff_eq!(*v, 1.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn shape_and_k_errors() {
        let a = DenseMatrix::zeros(4, 2);
        let b = DenseMatrix::zeros(5, 2);
        assert!(aligned_cosine_similarity(&a, &b, false).is_err());
        let z = DenseMatrix::identity(4);
        assert!(knn_jaccard(&z, &z, 4).is_err());
        assert!(compare_runs(&[&z], &CompareOptions::default()).is_err());
    }

    #[test]
    fn pair_enumeration() {
        assert_eq!(run_pairs(3), vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(run_pairs(30).len(), 435);
    }

    #[test]
    fn zero_rows_are_flagged() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let s = aligned_cosine_similarity(&a, &a, false).unwrap();
        assert_eq!(s.undefined, vec![false, true, false]);
        assert_eq!(s.values[1], 0.0);
        assert_eq!(s.defined_mean(), Some(1.0));
    }
}
