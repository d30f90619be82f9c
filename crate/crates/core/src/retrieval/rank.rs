use super::features::{extract_features, FeatureVector, QuestionTerms};
use super::index::InvertedIndex;
use crate::ranker::{LinearModel, ModelError};

/// Passages handed to the prover per question by default.
pub const DEFAULT_TOP_K: usize = 200;

#[derive(Clone, Debug)]
pub struct RankedPassage {
    pub id: String,
    pub score: f64,
    pub features: FeatureVector,
}

/// Scores every passage that overlaps the question and returns the best
/// `k`, by descending score with ascending passage id on ties.
pub fn rank_passages(
    question: &str,
    index: &InvertedIndex,
    model: &LinearModel,
    k: usize,
) -> Result<Vec<RankedPassage>, ModelError> {
    let terms = QuestionTerms::new(question, index);
    let mut ranked = Vec::new();
    for doc in 0..index.doc_count() {
        let features = extract_features(&terms, doc, index);
        if !features.has_overlap() {
            continue;
        }
        ranked.push(RankedPassage {
            id: index.doc(doc).id.clone(),
            score: model.score(&features.to_vec())?,
            features,
        });
    }
    ranked.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.id.cmp(&b.id)));
    ranked.truncate(k.max(1));
    Ok(ranked)
}
