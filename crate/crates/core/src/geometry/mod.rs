//! Node-wise stability measures between embeddings of the same graph.

mod aggregate;
mod angles;
mod knn;
mod measures;

pub use aggregate::{aggregate, centrality_profile, letter_values, moving_average_window, CentralityProfile, LetterValues, ProfilePoint, StabilityReport};
pub use angles::{angle_degrees, angle_deviation, mean_absolute_deviation, AngleDeviationReport, CategoryDeviation};
pub use knn::{knn, knn_normalized, KnnTable};
pub use measures::{
    aligned_cosine_similarity, compare_runs, jaccard_from_tables, knn_jaccard, run_pairs, second_order_cosine, second_order_from_parts,
    CompareOptions, Measure, PairwiseNodeScores, PreparedEmbedding,
};
