use serde::{Deserialize, Serialize};

use crate::graph::{NodePairSample, PairCategory};
use crate::linalg::DenseMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryDeviation {
    pub category: PairCategory,
    /// Mean absolute deviation in degrees, one per usable pair.
    pub per_pair: Vec<f64>,
    /// Pairs dropped because a vector was zero in some run.
    pub skipped: usize,
    /// `None` when no pair was usable.
    pub mean: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleDeviationReport {
    pub run_count: usize,
    pub categories: Vec<CategoryDeviation>,
}

impl AngleDeviationReport {
    pub fn category(&self, c: PairCategory) -> Option<&CategoryDeviation> {
        self.categories.iter().find(|d| d.category == c)
    }
}

/// Angle between two vectors in degrees, `None` if either is zero.
///
/// Uses `2·atan2(‖â − b̂‖, ‖â + b̂‖)`, which unlike `acos` of the cosine stays
/// accurate for nearly parallel vectors.
pub fn angle_degrees(a: &[f64], b: &[f64]) -> Option<f64> {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    let (mut diff, mut sum) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (x, y) = (x / na, y / nb);
        diff += (x - y) * (x - y);
        sum += (x + y) * (x + y);
    }
    Some((2.0 * diff.sqrt().atan2(sum.sqrt())).to_degrees())
}

/// Mean absolute deviation of `values` around their mean.
pub fn mean_absolute_deviation(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean).abs()).sum::<f64>() / n
}

/// For each sampled pair, the spread across runs of the angle between the
/// two nodes' vectors.
pub fn angle_deviation(runs: &[&DenseMatrix], samples: &[&NodePairSample]) -> Result<AngleDeviationReport> {
    if runs.len() < 2 {
        return Err(Error::InsufficientData(format!("angle deviation needs at least 2 runs, got {}", runs.len())));
    }
    let n = runs[0].rows();
    if runs.iter().any(|z| z.rows() != n) {
        return Err(Error::Shape("runs differ in node count".into()));
    }
    let mut categories = Vec::with_capacity(samples.len());
    let mut angles = Vec::with_capacity(runs.len());
    for sample in samples {
        let mut per_pair = Vec::with_capacity(sample.pairs.len());
        let mut skipped = 0;
        for &(u, v) in &sample.pairs {
            if u >= n || v >= n {
                return Err(Error::Shape(format!("pair ({u}, {v}) outside {n} nodes")));
            }
            angles.clear();
            for z in runs {
                match angle_degrees(z.row(u), z.row(v)) {
                    Some(a) => angles.push(a),
                    None => break,
                }
            }
            if angles.len() < runs.len() {
                skipped += 1;
                continue;
            }
            per_pair.push(mean_absolute_deviation(&angles));
        }
        let mean = (!per_pair.is_empty()).then(|| per_pair.iter().sum::<f64>() / per_pair.len() as f64);
        categories.push(CategoryDeviation {
            category: sample.category,
            per_pair,
            skipped,
            mean,
        });
    }
    Ok(AngleDeviationReport {
        run_count: runs.len(),
        categories,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn planar(deg: &[f64]) -> DenseMatrix {
        DenseMatrix::from_rows(&deg.iter().map(|a| vec![a.to_radians().cos(), a.to_radians().sin()]).collect::<Vec<_>>()).unwrap()
    }

    fn sample(pairs: Vec<(usize, usize)>) -> NodePairSample {
        NodePairSample {
            category: PairCategory::OneHop,
            pairs,
            incomplete: false,
        }
    }

    #[test]
    fn two_runs_ten_and_twenty_degrees() {
        let a = planar(&[0.0, 10.0]);
        let b = planar(&[0.0, 20.0]);
        let r = angle_deviation(&[&a, &b], &[&sample(vec![(0, 1)])]).unwrap();
        assert_abs_diff_eq!(r.categories[0].per_pair[0], 5.0, epsilon = 1e-9);
    }

    #[test]
    fn identical_runs_have_zero_deviation() {
        let a = planar(&[0.0, 33.0, 170.0]);
        let r = angle_deviation(&[&a, &a, &a], &[&sample(vec![(0, 1), (1, 2), (0, 2)])]).unwrap();
        assert!(r.categories[0].per_pair.iter().all(|&v| v == 0.0));
        assert_eq!(r.categories[0].mean, Some(0.0));
    }

    #[test]
    fn zero_vectors_are_skipped() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let r = angle_deviation(&[&a, &a], &[&sample(vec![(0, 1)])]).unwrap();
        assert_eq!(r.categories[0].skipped, 1);
        assert_eq!(r.categories[0].mean, None);
        assert!(angle_deviation(&[&a], &[]).is_err());
    }

    #[test]
    fn angles_stay_in_range() {
        assert_abs_diff_eq!(angle_degrees(&[1.0, 0.0], &[-1.0, 0.0]).unwrap(), 180.0, epsilon = 1e-12);
        assert!(angle_degrees(&[1.0, 1.0], &[2.0, 2.0]).unwrap() < 1e-12);
        assert_abs_diff_eq!(angle_degrees(&[1.0, 0.0], &[1.0, 1.0]).unwrap(), 45.0, epsilon = 1e-12);
        assert_abs_diff_eq!(angle_degrees(&[1.0, 0.0], &[1.0, 1e-9]).unwrap(), 1e-9f64.to_degrees(), epsilon = 1e-18);
    }
}
