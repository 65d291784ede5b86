//! Test-only helpers and independent oracles.
#![allow(dead_code)]

use nestab_core::linalg::DenseMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn gaussian(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    let mut r = rng(seed);
    DenseMatrix::from_fn(rows, cols, |_, _| r.sample(StandardNormal))
}

/// Random orthogonal matrix: modified Gram–Schmidt on a Gaussian matrix.
pub fn random_orthogonal(d: usize, seed: u64) -> DenseMatrix {
    let g = gaussian(d, d, seed);
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for j in 0..d {
        let mut c = g.column(j);
        for b in &cols {
            let p: f64 = c.iter().zip(b).map(|(x, y)| x * y).sum();
            c.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
        }
        let n = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        c.iter_mut().for_each(|x| *x /= n);
        cols.push(c);
    }
    DenseMatrix::from_fn(d, d, |i, j| cols[j][i])
}

/// Singular values (descending) by one-sided Jacobi rotations: columns are
/// rotated pairwise until mutually orthogonal, after which the column norms
/// are the singular values.
pub fn jacobi_singular_values(a: &DenseMatrix) -> Vec<f64> {
    let (m, n) = a.shape();
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|x| x * x).sum();
                let beta: f64 = cols[q].iter().map(|x| x * x).sum();
                let gamma: f64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 {
                    continue;
                }
                off = off.max(gamma.abs() / (alpha * beta).sqrt());
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let (x, y) = (cols[p][i], cols[q][i]);
                    cols[p][i] = c * x - s * y;
                    cols[q][i] = s * x + c * y;
                }
            }
        }
        if off < 1e-15 {
            break;
        }
    }
    let mut s: Vec<f64> = cols.iter().map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s.truncate(m.min(n));
    s
}

pub fn max_orthonormality_error(q: &DenseMatrix) -> f64 {
    let g = q.t_matmul(q);
    let mut worst: f64 = 0.0;
    for i in 0..g.rows() {
        for j in 0..g.cols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).abs());
        }
    }
    worst
}

pub fn max_abs_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn cos(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        d / (na * nb)
    }
}

/// Full O(N²) scan: every other node sorted by cosine descending, ties by id.
pub fn brute_force_knn(z: &DenseMatrix, k: usize) -> Vec<Vec<u32>> {
    let n = z.rows();
    (0..n)
        .map(|i| {
            let mut all: Vec<(f64, u32)> = (0..n).filter(|&j| j != i).map(|j| (cos(z.row(i), z.row(j)), j as u32)).collect();
            all.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            all.truncate(k);
            all.into_iter().map(|(_, j)| j).collect()
        })
        .collect()
}

/// Second-order cosine straight from its definition, given neighbor lists.
pub fn direct_second_order(zl: &DenseMatrix, zm: &DenseMatrix, nl: &[Vec<u32>], nm: &[Vec<u32>]) -> Vec<f64> {
    (0..zl.rows())
        .map(|i| {
            let mut union: Vec<u32> = nl[i].iter().chain(&nm[i]).copied().collect();
            union.sort();
            union.dedup();
            let sl: Vec<f64> = union.iter().map(|&u| cos(zl.row(i), zl.row(u as usize))).collect();
            let sm: Vec<f64> = union.iter().map(|&u| cos(zm.row(i), zm.row(u as usize))).collect();
            cos(&sl, &sm)
        })
        .collect()
}

/// Per-node aligned cosine using the 2-D orthogonal map found by exhaustive
/// search over rotations and reflections at `steps` angles.
pub fn grid_aligned_cosine(zl: &DenseMatrix, zm: &DenseMatrix, steps: usize) -> Vec<f64> {
    assert_eq!(zl.cols(), 2);
    let unit = |z: &DenseMatrix| -> Vec<[f64; 2]> {
        (0..z.rows())
            .map(|i| {
                let n = (z[(i, 0)].powi(2) + z[(i, 1)].powi(2)).sqrt();
                [z[(i, 0)] / n, z[(i, 1)] / n]
            })
            .collect()
    };
    let (a, b) = (unit(zl), unit(zm));
    let apply = |q: &[[f64; 2]; 2], v: &[f64; 2]| [v[0] * q[0][0] + v[1] * q[1][0], v[0] * q[0][1] + v[1] * q[1][1]];
    let mut best = (f64::NEG_INFINITY, [[1.0, 0.0], [0.0, 1.0]]);
    for step in 0..steps {
        let t = std::f64::consts::TAU * step as f64 / steps as f64;
        let (c, s) = (t.cos(), t.sin());
        for q in [[[c, -s], [s, c]], [[c, s], [s, -c]]] {
            let fit: f64 = a.iter().zip(&b).map(|(x, y)| {
                let r = apply(&q, x);
                r[0] * y[0] + r[1] * y[1]
            }).sum();
            if fit > best.0 {
                best = (fit, q);
            }
        }
    }
    a.iter().zip(&b).map(|(x, y)| {
        let r = apply(&best.1, x);
        r[0] * y[0] + r[1] * y[1]
    }).collect()
}
pub mod graphs;
