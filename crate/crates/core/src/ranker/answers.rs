use std::collections::HashSet;

use super::model::{LinearModel, ModelError};
use crate::logic::{Substitution, Term};

/// Signals about one proved answer, fed to the answer ranker.
#[derive(Clone, Debug, PartialEq)]
pub struct AnswerFeatures {
    pub relax_count: usize,
    pub proof_level: usize,
    /// Passage ranker score of the passage the answer came from.
    pub retrieval_score: f64,
    /// Fraction of the answer's derivation cone traced to passage facts.
    pub passage_support_ratio: f64,
    pub answer_is_ground: bool,
}

impl AnswerFeatures {
    pub fn to_vec(&self) -> Vec<f64> {
        vec![
            self.relax_count as f64,
            self.proof_level as f64,
            self.retrieval_score,
            self.passage_support_ratio,
            if self.answer_is_ground { 1.0 } else { 0.0 },
        ]
    }

    /// True when no binding is a compound term (vacuously for yes/no
    /// answers).
    pub fn bindings_are_constants(bindings: &Substitution) -> bool {
        bindings.iter().all(|(_, t)| matches!(t, Term::Const(_)))
    }
}

/// A proved answer with where it came from. `payload` carries whatever the
/// caller needs to render the answer later.
#[derive(Clone, Debug)]
pub struct AnswerCandidate<P> {
    pub bindings: Substitution,
    pub features: AnswerFeatures,
    pub passage_id: String,
    pub payload: P,
}

#[derive(Clone, Debug)]
pub struct RankedAnswer<P> {
    pub candidate: AnswerCandidate<P>,
    pub score: f64,
}

/// Scores candidates, keeps the best provenance per distinct binding, and
/// returns the top `n` by score (ties: fewer relaxations, then passage id).
pub fn rank_answers<P>(
    candidates: Vec<AnswerCandidate<P>>,
    model: &LinearModel,
    n: usize,
) -> Result<Vec<RankedAnswer<P>>, ModelError> {
    let mut scored = candidates
        .into_iter()
        .map(|c| {
            let score = model.score(&c.features.to_vec())?;
            Ok(RankedAnswer { candidate: c, score })
        })
        .collect::<Result<Vec<_>, ModelError>>()?;
    scored.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(a.candidate.features.relax_count.cmp(&b.candidate.features.relax_count))
            .then_with(|| a.candidate.passage_id.cmp(&b.candidate.passage_id))
    });
    let mut seen = HashSet::new();
    Ok(scored
        .into_iter()
        .filter(|r| seen.insert(r.candidate.bindings.clone()))
        .take(n)
        .collect())
}
