//! Logistic-regression rankers for passages and answers.

mod answers;
mod model;
mod train;

pub use answers::{rank_answers, AnswerCandidate, AnswerFeatures, RankedAnswer};
pub use model::{sigmoid, LinearModel, ModelError, ModelKind};
pub use train::{gradient, mean_log_loss, train, TrainError, TrainingSet};

/// Answers presented per question by default.
pub const DEFAULT_ANSWERS: usize = 3;
