//! Node classification on embeddings and the stability of its predictions.

mod classifier;
mod cv;
mod metrics;
mod split;
mod stable;

pub use classifier::{
    loss_and_gradient, predict, train_classifier, ClassifierMode, ClassifierModel, ClassifierParams, LossGradient, PredictionRun,
    TrainingTrace,
};
pub use cv::{cross_validate, CrossValidation};
pub use metrics::{f1_from_counts, macro_f1, micro_f1};
pub use split::{make_split, SplitSpec};
pub use stable::{classifier_seed, stability_experiment, stable_core, EmbeddingCore, ModeI, ModeII, StableCoreReport};
