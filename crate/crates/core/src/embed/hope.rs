//! HOPE: a truncated factorization of the Katz proximity matrix.

use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::linalg::{randomized_svd, DenseMatrix, LinearOperator, SvdParams};
use crate::{Error, Result};

use super::{config_digest, Algorithm, Embedding};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HopeConfig {
    /// Katz decay is `beta_factor / λ_max(A)`.
    pub beta_factor: f64,
    pub neumann_tol: f64,
    pub neumann_max_terms: usize,
    /// Extra sketch columns for the randomized SVD; `None` uses
    /// twice the rank, since Katz spectra of near-regular graphs decay slowly.
    pub oversample: Option<usize>,
    pub power_iters: usize,
}

impl Default for HopeConfig {
    fn default() -> Self {
        Self {
            beta_factor: 0.5,
            neumann_tol: 1e-9,
            neumann_max_terms: 500,
            oversample: None,
            power_iters: 10,
        }
    }
}

/// Spectral radius of the adjacency matrix by power iteration on `A + I`
/// (the shift keeps bipartite graphs from oscillating), started from the
/// all-ones vector.
pub fn estimate_spectral_radius(g: &Graph) -> Result<f64> {
    let n = g.node_count();
    if g.arc_count() == 0 {
        return Ok(0.0);
    }
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut y = vec![0.0; n];
    let mut estimate = 0.0;
    for _ in 0..10_000 {
        for u in 0..n {
            let mut acc = x[u];
            for (&v, &w) in g.neighbors(u).iter().zip(g.neighbor_weights(u)) {
                acc += w * x[v as usize];
            }
            y[u] = acc;
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Numerical("spectral radius estimate collapsed".into()));
        }
        let next = norm - 1.0;
        y.iter_mut().for_each(|v| *v /= norm);
        std::mem::swap(&mut x, &mut y);
        if (next - estimate).abs() <= 1e-12 * next.abs().max(1.0) {
            return Ok(next.max(0.0));
        }
        estimate = next;
    }
    Err(Error::Numerical(format!(
        "spectral radius power iteration did not settle (last estimate {estimate})"
    )))
}

/// `S = Σ_{t=1..terms} βᵗ Aᵗ` applied without forming `S`.
#[derive(Debug, Clone)]
pub struct KatzOperator<'g> {
    g: &'g Graph,
    /// Reverse arcs, needed for `Aᵀ` on directed graphs.
    transpose: Option<Graph>,
    beta: f64,
    terms: usize,
}

impl KatzOperator<'_> {
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn terms(&self) -> usize {
        self.terms
    }

    /// Dense `S`, for tests and small graphs.
    pub fn to_dense(&self) -> DenseMatrix {
        self.apply_block(&DenseMatrix::identity(self.g.node_count()))
    }

    fn series(&self, g: &Graph, x: &DenseMatrix) -> DenseMatrix {
        let (n, k) = x.shape();
        let mut term = x.clone();
        let mut next = DenseMatrix::zeros(n, k);
        let mut acc = DenseMatrix::zeros(n, k);
        for _ in 0..self.terms {
            for u in 0..n {
                let out = next.row_mut(u);
                out.iter_mut().for_each(|v| *v = 0.0);
                for (&v, &w) in g.neighbors(u).iter().zip(g.neighbor_weights(u)) {
                    let bw = self.beta * w;
                    for (o, t) in out.iter_mut().zip(term.row(v as usize)) {
                        *o += bw * t;
                    }
                }
            }
            std::mem::swap(&mut term, &mut next);
            for (a, t) in acc.as_mut_slice().iter_mut().zip(term.as_slice()) {
                *a += t;
            }
        }
        acc
    }
}

impl LinearOperator for KatzOperator<'_> {
    fn nrows(&self) -> usize {
        self.g.node_count()
    }

    fn ncols(&self) -> usize {
        self.g.node_count()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let col = DenseMatrix::from_vec(x.len(), 1, x.to_vec()).expect("column vector");
        y.copy_from_slice(self.series(self.g, &col).as_slice());
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        let col = DenseMatrix::from_vec(x.len(), 1, x.to_vec()).expect("column vector");
        let g = self.transpose.as_ref().unwrap_or(self.g);
        y.copy_from_slice(self.series(g, &col).as_slice());
    }

    fn apply_block(&self, x: &DenseMatrix) -> DenseMatrix {
        self.series(self.g, x)
    }

    fn apply_transpose_block(&self, x: &DenseMatrix) -> DenseMatrix {
        self.series(self.transpose.as_ref().unwrap_or(self.g), x)
    }
}

/// Builds the Katz operator with decay `β = beta_factor / λ_max`.
///
/// The series is cut after the first `T` with `(β λ_max)^T ≤ neumann_tol`,
/// which bounds the relative size of the discarded tail; the same `T` is used
/// for every vector so the operator stays linear. Fails when that `T` exceeds
/// `neumann_max_terms`.
pub fn katz_operator<'g>(g: &'g Graph, cfg: &HopeConfig) -> Result<KatzOperator<'g>> {
    if !(cfg.beta_factor > 0.0 && cfg.beta_factor < 1.0) {
        return Err(Error::Config(format!("beta_factor {} outside (0, 1)", cfg.beta_factor)));
    }
    let radius = estimate_spectral_radius(g)?;
    katz_operator_with_beta(g, cfg, radius, if radius > 0.0 { cfg.beta_factor / radius } else { cfg.beta_factor })
}

/// As [`katz_operator`] with an explicit decay and spectral radius.
pub(crate) fn katz_operator_with_beta<'g>(g: &'g Graph, cfg: &HopeConfig, radius: f64, beta: f64) -> Result<KatzOperator<'g>> {
    let ratio = beta * radius;
    if ratio >= 1.0 {
        return Err(Error::Numerical(format!(
            "Katz series diverges for beta = {beta} (beta * lambda_max = {ratio})"
        )));
    }
    let terms = if g.arc_count() == 0 {
        0
    } else if ratio <= 0.0 {
        // nilpotent adjacency: paths are at most n - 1 long
        g.node_count().min(cfg.neumann_max_terms)
    } else {
        let t = (cfg.neumann_tol.ln() / ratio.ln()).ceil().max(1.0) as usize;
        if t > cfg.neumann_max_terms {
            return Err(Error::Numerical(format!(
                "Katz series with beta = {beta} needs {t} terms, more than the limit of {}",
                cfg.neumann_max_terms
            )));
        }
        t
    };
    let transpose = g.is_directed().then(|| {
        let mut b = crate::graph::GraphBuilder::new(g.node_count(), true);
        for (u, v, w) in g.arcs() {
            b.add_edge(v, u, w);
        }
        b.build().0
    });
    Ok(KatzOperator {
        g,
        transpose,
        beta,
        terms,
    })
}

/// HOPE embedding of width `d`: rank-`d/2` randomized SVD of the Katz
/// matrix, source factors `U √Σ` next to target factors `V √Σ`. The SVD test
/// matrix is the only randomness.
pub fn hope_embed(g: &Graph, d: usize, cfg: &HopeConfig, seed: u64) -> Result<Embedding> {
    if d == 0 || d % 2 != 0 {
        return Err(Error::Config(format!("HOPE needs a positive even dimension, got {d}")));
    }
    let n = g.node_count();
    if n == 0 {
        return Err(Error::InsufficientData("HOPE on an empty graph".into()));
    }
    let rank = d / 2;
    if rank > n {
        return Err(Error::Config(format!("HOPE rank {rank} exceeds node count {n}")));
    }
    let digest = config_digest("hope", cfg, d);
    if g.arc_count() == 0 {
        return Embedding::new(DenseMatrix::zeros(n, d), Algorithm::Hope, seed, digest);
    }
    let op = katz_operator(g, cfg)?;
    let params = SvdParams {
        rank,
        oversample: cfg.oversample.unwrap_or(2 * rank),
        power_iters: cfg.power_iters,
    };
    let f = randomized_svd(&op, params, seed)?;
    let scale = |m: &DenseMatrix| {
        let mut m = m.clone();
        for i in 0..m.rows() {
            for (x, s) in m.row_mut(i).iter_mut().zip(&f.sigma) {
                *x *= s.sqrt();
            }
        }
        m
    };
    let matrix = scale(&f.u).hstack(&scale(&f.v))?;
    Embedding::new(matrix, Algorithm::Hope, seed, digest)
}
