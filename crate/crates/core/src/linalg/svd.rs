//! Truncated SVD by randomized range finding.

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};

use super::{operator::LinearOperator, DenseMatrix};
use crate::rng::{self, Stream};
use crate::{Error, Result};

/// `A ≈ U diag(sigma) Vᵀ` with orthonormal columns in `u` and `v` and
/// `sigma` non-negative and descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdFactors {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

impl SvdFactors {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    /// `U diag(sigma) Vᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let mut us = self.u.clone();
        for i in 0..us.rows() {
            for (x, s) in us.row_mut(i).iter_mut().zip(&self.sigma) {
                *x *= s;
            }
        }
        us.matmul_t(&self.v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SvdParams {
    pub rank: usize,
    pub oversample: usize,
    pub power_iters: usize,
}

impl SvdParams {
    pub fn new(rank: usize) -> Self {
        Self {
            rank,
            oversample: 10,
            power_iters: 4,
        }
    }
}

/// Exact thin SVD of a dense matrix, singular values sorted descending.
pub fn thin_svd(a: &DenseMatrix) -> SvdFactors {
    let (m, n) = a.shape();
    let r = m.min(n);
    if r == 0 {
        return SvdFactors {
            u: DenseMatrix::zeros(m, 0),
            sigma: Vec::new(),
            v: DenseMatrix::zeros(n, 0),
        };
    }
    let na = DMatrix::from_row_slice(m, n, a.as_slice());
    let svd = na.svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let s = svd.singular_values;

    let mut order: Vec<usize> = (0..r).collect();
    // stable sort keeps the solver's order among equal values
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    let sigma = order.iter().map(|&i| s[i].max(0.0)).collect();
    let u = DenseMatrix::from_fn(m, r, |i, j| u[(i, order[j])]);
    let v = DenseMatrix::from_fn(n, r, |i, j| v_t[(order[j], i)]);
    SvdFactors { u, sigma, v }
}

/// Replaces the columns of `a` with an orthonormal basis of their span,
/// using classical Gram–Schmidt applied twice. Columns that collapse
/// numerically are replaced by the lowest-index canonical basis vectors that
/// are still independent, so the result always has orthonormal columns.
pub fn orthonormalize_columns(a: &DenseMatrix) -> DenseMatrix {
    let (m, k) = a.shape();
    assert!(k <= m, "cannot orthonormalize {k} columns in dimension {m}");
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut next_canonical = 0;
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    for j in 0..k {
        let original = a.column(j);
        let norm0 = original.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut col = original;
        let mut accepted = false;
        if norm0 > 1e-13 * scale {
            accepted = project_out(&mut col, &basis, norm0);
        }
        while !accepted {
            assert!(next_canonical < m, "ran out of canonical directions");
            col = vec![0.0; m];
            col[next_canonical] = 1.0;
            next_canonical += 1;
            accepted = project_out(&mut col, &basis, 1.0);
        }
        basis.push(col);
    }
    let mut q = DenseMatrix::zeros(m, k);
    for (j, col) in basis.iter().enumerate() {
        q.set_column(j, col);
    }
    q
}

/// Two rounds of projection against `basis`, then normalization. Returns
/// false when too little of the vector survives.
fn project_out(col: &mut [f64], basis: &[Vec<f64>], reference_norm: f64) -> bool {
    for _ in 0..2 {
        for b in basis {
            let c = super::dot(b, col);
            for (x, y) in col.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
    }
    let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm <= 1e-10 * reference_norm || norm == 0.0 {
        return false;
    }
    col.iter_mut().for_each(|v| *v /= norm);
    true
}

/// Randomized truncated SVD.
///
/// Draws a Gaussian test matrix with `rank + oversample` columns from the
/// SVD stream of `seed`, runs `power_iters` rounds of subspace iteration with
/// re-orthonormalization after every application, takes the exact SVD of the
/// small projected factor and keeps the leading `rank` triplets. When
/// `rank + oversample` exceeds the smaller dimension the sketch width is
/// clamped with a warning.
pub fn randomized_svd<O: LinearOperator + ?Sized>(op: &O, params: SvdParams, seed: u64) -> Result<SvdFactors> {
    let (m, n) = (op.nrows(), op.ncols());
    let min_dim = m.min(n);
    if params.rank == 0 || params.rank > min_dim {
        return Err(Error::Config(format!(
            "SVD rank {} outside [1, {min_dim}] for a {m}x{n} operator",
            params.rank
        )));
    }
    let mut width = params.rank + params.oversample;
    if width > min_dim {
        log::warn!(
            "sketch width {} exceeds operator dimension {min_dim}; clamping",
            width
        );
        width = min_dim;
    }

    let mut rng = rng::stream(seed, Stream::Svd);
    let mut omega = DenseMatrix::zeros(n, width);
    for v in omega.as_mut_slice() {
        *v = StandardNormal.sample(&mut rng);
    }

    #[cfg(debug_assertions)]
    {
        let x = omega.column(0);
        let y = omega.column(width - 1);
        let defect = super::operator::additivity_defect(op, &x, &y);
        debug_assert!(defect < 1e-8, "operator is not additive (relative defect {defect:e})");
    }

    let mut q = orthonormalize_columns(&op.apply_block(&omega));
    for _ in 0..params.power_iters {
        let z = orthonormalize_columns(&op.apply_transpose_block(&q));
        q = orthonormalize_columns(&op.apply_block(&z));
    }
    // B = Qᵀ A, handled through its transpose Aᵀ Q = W S Zᵀ
    let bt = op.apply_transpose_block(&q);
    let small = thin_svd(&bt);
    let u = q.matmul(&small.v);
    Ok(SvdFactors {
        u: u.leading_columns(params.rank),
        sigma: small.sigma[..params.rank].to_vec(),
        v: small.u.leading_columns(params.rank),
    })
}
