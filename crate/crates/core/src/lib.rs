//! Node embeddings under controlled random seeds, and the measures used to
//! quantify how much they move between runs.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: sparse graphs, edge-list ingestion, synthetic generators,
//!   centrality scores and hop-distance pair sampling.
//! - [`linalg`]: dense matrices, randomized truncated SVD and the orthogonal
//!   Procrustes solver.
//! - [`embed`]: HOPE, node2vec and LINE on a shared skip-gram engine, plus
//!   embedding file IO for externally computed embeddings.
//! - [`geometry`]: exact cosine k-NN, aligned cosine, k-NN Jaccard,
//!   second-order cosine, angle deviation and aggregation.
//! - [`downstream`]: seeded logistic-regression node classification, F1
//!   scores and stable cores.

pub mod downstream;
pub mod embed;
pub mod error;
pub mod geometry;
pub mod graph;
pub mod linalg;
pub mod rng;

pub use error::{Error, Result};
