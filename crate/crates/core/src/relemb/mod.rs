//! Relational embeddings: one vector per user, learned by predicting the
//! receiving user of every interaction pair against sampled negatives.

mod corpus;
mod embedding;
mod sampling;
mod sgns;
mod trainer;
mod vocab;

pub use corpus::{build_corpus, CorpusMode};
pub use embedding::RelationalEmbedding;
pub use sampling::{keep_probability, subsample_discount, NegativeTable, SubsampleUnit};
pub use sgns::{pair_coefficients, pair_gradient, sgns_step, PairGradient, TrainerState};
pub use trainer::{mean_loss, train, train_with_progress, EpochStats, TrainConfig, Trainer, TrainingPlan};
pub use vocab::Vocab;
