//! Seeded embedding algorithms and embedding files.

mod alias;
mod hope;
mod io;
mod line;
mod node2vec;
mod sgns;
mod walks;

pub use alias::AliasTable;
pub use hope::{estimate_spectral_radius, hope_embed, katz_operator, HopeConfig, KatzOperator};
pub use io::{load_embedding, save_embedding, save_embedding_binary, EMBEDDING_MAGIC};
pub use line::{line_embed, line_train, LineConfig, LineOrder};
pub use node2vec::{node2vec_embed, node2vec_train, Node2vecConfig};
pub use sgns::{logistic_coefficient, sgns_loss_and_gradient, sgns_train, PairGradient, SgnsConfig, SgnsModel, TrainStats};
pub use walks::{random_walks, transition_weights};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::linalg::DenseMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Hope,
    Node2vec,
    Line,
    External,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Hope => "hope",
            Algorithm::Node2vec => "node2vec",
            Algorithm::Line => "line",
            Algorithm::External => "external",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hope" => Ok(Algorithm::Hope),
            "node2vec" => Ok(Algorithm::Node2vec),
            "line" => Ok(Algorithm::Line),
            "external" => Ok(Algorithm::External),
            other => Err(Error::Config(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// One `N × d` embedding and where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub matrix: DenseMatrix,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub config_digest: String,
}

impl Embedding {
    pub fn new(matrix: DenseMatrix, algorithm: Algorithm, seed: u64, config_digest: impl Into<String>) -> Result<Self> {
        if matrix.cols() == 0 {
            return Err(Error::Config("embedding dimension must be positive".into()));
        }
        if !matrix.is_finite() {
            return Err(Error::Numerical("embedding contains non-finite values".into()));
        }
        Ok(Self {
            matrix,
            algorithm,
            seed,
            config_digest: config_digest.into(),
        })
    }

    /// Wraps a bare matrix, e.g. one read from disk.
    pub fn external(matrix: DenseMatrix, seed: u64) -> Result<Self> {
        Self::new(matrix, Algorithm::External, seed, "external")
    }

    pub fn node_count(&self) -> usize {
        self.matrix.rows()
    }

    pub fn dim(&self) -> usize {
        self.matrix.cols()
    }
}

/// Runs of one algorithm and configuration on one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    runs: Vec<Embedding>,
    graph_digest: String,
}

impl EmbeddingSet {
    /// Checks that all runs share shape, algorithm and config digest and that
    /// their seeds are pairwise distinct.
    pub fn new(runs: Vec<Embedding>, graph_digest: impl Into<String>) -> Result<Self> {
        if let Some(first) = runs.first() {
            for (i, e) in runs.iter().enumerate().skip(1) {
                if e.matrix.shape() != first.matrix.shape() {
                    return Err(Error::Shape(format!(
                        "run {i} has shape {:?}, run 0 has {:?}",
                        e.matrix.shape(),
                        first.matrix.shape()
                    )));
                }
                if e.algorithm != first.algorithm || e.config_digest != first.config_digest {
                    return Err(Error::Config(format!("run {i} was produced by a different algorithm or config")));
                }
            }
            let mut seeds: Vec<u64> = runs.iter().map(|e| e.seed).collect();
            seeds.sort_unstable();
            if seeds.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Config("embedding runs must have distinct seeds".into()));
            }
        }
        Ok(Self {
            runs,
            graph_digest: graph_digest.into(),
        })
    }

    pub fn runs(&self) -> &[Embedding] {
        &self.runs
    }

    pub fn len(&self) -> usize {
        self.runs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn graph_digest(&self) -> &str {
        &self.graph_digest
    }
}

/// Short hex digest of a configuration's debug rendering.
pub(crate) fn config_digest(tag: &str, cfg: &impl std::fmt::Debug, dim: usize) -> String {
    let mut h = Sha256::new();
    h.update(format!("{tag};d={dim};{cfg:?}").as_bytes());
    crate::graph::hex(&h.finalize()[..16])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_invariants() {
        let m = DenseMatrix::zeros(3, 2);
        let a = Embedding::new(m.clone(), Algorithm::Hope, 1, "x").unwrap();
        let b = Embedding::new(m.clone(), Algorithm::Hope, 2, "x").unwrap();
        assert!(EmbeddingSet::new(vec![a.clone(), b.clone()], "g").is_ok());
        assert!(EmbeddingSet::new(vec![a.clone(), a.clone()], "g").is_err());
        let c = Embedding::new(DenseMatrix::zeros(4, 2), Algorithm::Hope, 3, "x").unwrap();
        assert!(EmbeddingSet::new(vec![a.clone(), c], "g").is_err());
        let d = Embedding::new(m, Algorithm::Line, 3, "x").unwrap();
        assert!(EmbeddingSet::new(vec![a, d], "g").is_err());
    }

    #[test]
    fn rejects_non_finite_and_empty() {
        let mut m = DenseMatrix::zeros(2, 2);
        m[(0, 1)] = f64::NAN;
        assert!(Embedding::external(m, 0).is_err());
        assert!(Embedding::external(DenseMatrix::zeros(2, 0), 0).is_err());
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in [Algorithm::Hope, Algorithm::Node2vec, Algorithm::Line, Algorithm::External] {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("sdne".parse::<Algorithm>().is_err());
    }
}
