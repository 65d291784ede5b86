mod common;

use common::*;
use nestab_core::linalg::{procrustes_align, randomized_svd, row_normalize, thin_svd, DenseMatrix, SvdParams};

fn symmetric(n: usize, seed: u64) -> DenseMatrix {
    let g = gaussian(n, n, seed);
    DenseMatrix::from_fn(n, n, |i, j| (g[(i, j)] + g[(j, i)]) / 2.0)
}

/// `Q diag(lambda) Qᵀ` with a random eigenbasis.
fn symmetric_with_spectrum(lambda: &[f64], seed: u64) -> DenseMatrix {
    let q = random_orthogonal(lambda.len(), seed);
    let mut ql = q.clone();
    for i in 0..ql.rows() {
        for (x, l) in ql.row_mut(i).iter_mut().zip(lambda) {
            *x *= l;
        }
    }
    ql.matmul_t(&q)
}

#[test]
fn jacobi_oracle_agrees_with_dense_solver() {
    let a = gaussian(12, 7, 3);
    let oracle = jacobi_singular_values(&a);
    let s = thin_svd(&a).sigma;
    for (x, y) in oracle.iter().zip(&s) {
        assert!((x - y).abs() < 1e-10 * oracle[0]);
    }
}

#[test]
fn randomized_svd_matches_dense_oracle_on_decaying_spectrum() {
    for seed in 0..5 {
        // eigenvalues with alternating signs and geometric decay
        let lambda: Vec<f64> = (0..40).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 } * 0.7f64.powi(i)).collect();
        let a = symmetric_with_spectrum(&lambda, seed);
        let oracle = jacobi_singular_values(&a);
        let f = randomized_svd(&a, SvdParams::new(10), seed + 100).unwrap();
        for j in 0..10 {
            let rel = (f.sigma[j] - oracle[j]).abs() / oracle[j];
            assert!(rel < 1e-6, "seed {seed} sigma[{j}] rel err {rel:e}");
        }
        assert!(max_orthonormality_error(&f.u) < 1e-8);
        assert!(max_orthonormality_error(&f.v) < 1e-8);
        assert!(f.sigma.windows(2).all(|w| w[0] >= w[1]));
    }
}

#[test]
fn randomized_svd_on_gaussian_symmetric_operator() {
    // no spectral decay at all: only the leading values are expected to be
    // tight at the default sketch, the rest are reported for information
    let a = symmetric(40, 17);
    let oracle = jacobi_singular_values(&a);
    let f = randomized_svd(&a, SvdParams::new(10), 4).unwrap();
    let rel: Vec<f64> = (0..10).map(|j| (f.sigma[j] - oracle[j]).abs() / oracle[j]).collect();
    eprintln!("relative sigma errors on a flat spectrum: {rel:?}");
    assert!(rel[0] < 1e-3);
    // never overestimates: the estimates are singular values of a projection
    for j in 0..10 {
        assert!(f.sigma[j] <= oracle[j] * (1.0 + 1e-12));
    }
}

#[test]
fn exact_low_rank_operators_reconstruct() {
    for (seed, rank) in [(1u64, 3usize), (2, 8), (3, 10)] {
        let left = gaussian(60, rank, seed);
        let right = gaussian(45, rank, seed + 50);
        let a = left.matmul_t(&right);
        let f = randomized_svd(&a, SvdParams::new(10), seed).unwrap();
        let err = f.reconstruct().sub(&a).frobenius_norm() / a.frobenius_norm();
        assert!(err <= 1e-8, "rank {rank}: relative error {err:e}");
    }
}

#[test]
fn randomized_svd_is_seed_deterministic() {
    let a = symmetric(30, 2);
    let x = randomized_svd(&a, SvdParams::new(5), 9).unwrap();
    let y = randomized_svd(&a, SvdParams::new(5), 9).unwrap();
    assert_eq!(x, y);
}

#[test]
fn sketch_wider_than_operator_is_clamped() {
    let a = symmetric(8, 1);
    let f = randomized_svd(&a, SvdParams::new(6), 0).unwrap();
    let oracle = jacobi_singular_values(&a);
    for j in 0..6 {
        assert!((f.sigma[j] - oracle[j]).abs() < 1e-10);
    }
}

fn residual(source: &DenseMatrix, q: &DenseMatrix, target: &DenseMatrix) -> f64 {
    source.matmul(q).sub(target).frobenius_norm()
}

#[test]
fn procrustes_identity_and_rotation_recovery() {
    for seed in 0..5 {
        let z = row_normalize(&gaussian(50, 8, seed)).0;
        let a = procrustes_align(&z, &z).unwrap();
        assert!(max_abs_diff(&a.q, &DenseMatrix::identity(8)) < 1e-8);
        assert!(!a.degenerate);

        let r = random_orthogonal(8, seed + 10);
        let zr = z.matmul(&r);
        let a = procrustes_align(&z, &zr).unwrap();
        assert!(max_abs_diff(&a.q, &r) < 1e-8);
        assert!(max_orthonormality_error(&a.q) < 1e-8);
    }
}

/// Exhaustive search over the 2-D orthogonal group: rotations and
/// reflections at a 0.1 degree grid.
fn grid_min_residual(source: &DenseMatrix, target: &DenseMatrix) -> f64 {
    let mut best = f64::INFINITY;
    for step in 0..3600 {
        let t = (step as f64 * 0.1).to_radians();
        let (c, s) = (t.cos(), t.sin());
        for q in [
            DenseMatrix::from_rows(&[vec![c, -s], vec![s, c]]).unwrap(),
            DenseMatrix::from_rows(&[vec![c, s], vec![s, -c]]).unwrap(),
        ] {
            best = best.min(residual(source, &q, target));
        }
    }
    best
}

#[test]
fn procrustes_beats_exhaustive_grid_in_two_dimensions() {
    for seed in 0..20 {
        let a = gaussian(5, 2, seed);
        let b = gaussian(5, 2, seed + 1000);
        let q = procrustes_align(&a, &b).unwrap().q;
        let ours = residual(&a, &q, &b);
        let grid = grid_min_residual(&a, &b);
        assert!(ours <= grid + 1e-3, "seed {seed}: {ours} vs grid {grid}");
        assert!(ours <= residual(&a, &DenseMatrix::identity(2), &b) + 1e-12);
    }
}

#[test]
fn procrustes_flags_rank_deficiency_and_checks_shape() {
    let mut z = gaussian(10, 3, 1);
    for i in 0..10 {
        z[(i, 2)] = 0.0;
    }
    let a = procrustes_align(&z, &z).unwrap();
    assert!(a.degenerate);
    assert!(max_orthonormality_error(&a.q) < 1e-8);
    assert!(procrustes_align(&gaussian(10, 3, 1), &gaussian(9, 3, 1)).is_err());
}
