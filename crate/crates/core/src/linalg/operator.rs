use super::DenseMatrix;

/// A matrix known only through its action on vectors.
///
/// Block applications default to one column at a time; implementors with a
/// cheaper batched form should override them.
pub trait LinearOperator: Sync {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;

    /// `y = A x`, with `x.len() == ncols()` and `y.len() == nrows()`.
    fn apply(&self, x: &[f64], y: &mut [f64]);

    /// `y = Aᵀ x`.
    fn apply_transpose(&self, x: &[f64], y: &mut [f64]);

    /// `A X` for an `ncols × k` block.
    fn apply_block(&self, x: &DenseMatrix) -> DenseMatrix {
        column_wise(x, self.nrows(), |a, b| self.apply(a, b))
    }

    /// `Aᵀ X` for an `nrows × k` block.
    fn apply_transpose_block(&self, x: &DenseMatrix) -> DenseMatrix {
        column_wise(x, self.ncols(), |a, b| self.apply_transpose(a, b))
    }
}

fn column_wise(x: &DenseMatrix, out_rows: usize, mut f: impl FnMut(&[f64], &mut [f64])) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(out_rows, x.cols());
    let mut y = vec![0.0; out_rows];
    for j in 0..x.cols() {
        let col = x.column(j);
        f(&col, &mut y);
        out.set_column(j, &y);
    }
    out
}

impl LinearOperator for DenseMatrix {
    fn nrows(&self) -> usize {
        self.rows()
    }

    fn ncols(&self) -> usize {
        self.cols()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = super::dot(self.row(i), x);
        }
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (i, &xi) in x.iter().enumerate() {
            for (yj, &a) in y.iter_mut().zip(self.row(i)) {
                *yj += a * xi;
            }
        }
    }

    fn apply_block(&self, x: &DenseMatrix) -> DenseMatrix {
        self.matmul(x)
    }

    fn apply_transpose_block(&self, x: &DenseMatrix) -> DenseMatrix {
        self.t_matmul(x)
    }
}

/// Relative additivity defect `‖A(x + y) − Ax − Ay‖ / (‖Ax‖ + ‖Ay‖)` on the
/// given probe vectors. Used by debug builds to catch operators that are not
/// actually linear.
pub(crate) fn additivity_defect<O: LinearOperator + ?Sized>(op: &O, x: &[f64], y: &[f64]) -> f64 {
    let n = op.nrows();
    let (mut ax, mut ay, mut axy) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    op.apply(x, &mut ax);
    op.apply(y, &mut ay);
    let sum: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
    op.apply(&sum, &mut axy);
    let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let defect: Vec<f64> = (0..n).map(|i| axy[i] - ax[i] - ay[i]).collect();
    let scale = norm(&ax) + norm(&ay);
    if scale == 0.0 {
        norm(&defect)
    } else {
        norm(&defect) / scale
    }
}
