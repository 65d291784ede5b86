use super::{svd::thin_svd, DenseMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ProcrustesAlignment {
    /// Orthogonal `d × d` map with `source · q ≈ target`.
    pub q: DenseMatrix,
    /// Singular values of `sourceᵀ target`, descending.
    pub singular_values: Vec<f64>,
    /// The cross product was (numerically) rank deficient, so `q` is one of
    /// several minimizers.
    pub degenerate: bool,
}

/// Orthogonal `Q` minimizing `‖source · Q − target‖_F`.
///
/// With `sourceᵀ target = U Σ Vᵀ` the minimizer is `Q = U Vᵀ`. Callers are
/// expected to pass row-normalized matrices.
pub fn procrustes_align(source: &DenseMatrix, target: &DenseMatrix) -> Result<ProcrustesAlignment> {
    if source.shape() != target.shape() {
        return Err(Error::Shape(format!(
            "cannot align a {:?} embedding onto a {:?} one",
            source.shape(),
            target.shape()
        )));
    }
    let cross = source.t_matmul(target);
    let f = thin_svd(&cross);
    let q = f.u.matmul_t(&f.v);
    let top = f.sigma.first().copied().unwrap_or(0.0);
    let bottom = f.sigma.last().copied().unwrap_or(0.0);
    let degenerate = top == 0.0 || bottom <= 1e-10 * top;
    Ok(ProcrustesAlignment {
        q,
        singular_values: f.sigma,
        degenerate,
    })
}
