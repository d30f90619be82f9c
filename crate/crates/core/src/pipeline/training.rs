//! Labelled feature rows for the two rankers, derived from a gold set.

use std::time::Instant;

use super::bench::{matches_gold, GoldItem};
use super::engine::{AskOptions, AskStats, Engine};
use super::record::render_answer;
use crate::ranker::{LinearModel, ModelKind, TrainingSet};
use crate::relax::prove_with_relaxation;
use crate::retrieval::rank_passages;

/// One row per overlapping passage and gold question; a passage is positive
/// when it proves a gold answer without relaxation.
pub fn passage_training_set(engine: &Engine, gold: &[GoldItem]) -> TrainingSet {
    let mut rows = Vec::new();
    let neutral = LinearModel::zeros(ModelKind::Passage);
    for item in gold {
        let Ok(parsed) = engine.parse(&item.question) else {
            continue;
        };
        let ranked = rank_passages(&item.question, engine.index(), &neutral, engine.config().top_k_passages)
            .expect("neutral model has the passage dimension");
        for candidate in ranked {
            let passage = engine.passage(&candidate.id).expect("ranked ids come from the corpus");
            let positive =
                prove_with_relaxation(engine.background(), &passage.facts, &parsed.query, &engine.limits(), 0)
                    .map(|p| {
                        p.result
                            .answers
                            .iter()
                            .any(|a| matches_gold(&render_answer(&a.bindings, &passage.text), item))
                    })
                    .unwrap_or(false);
            rows.push((candidate.features.to_vec(), positive));
        }
    }
    TrainingSet::new(ModelKind::Passage, rows)
}

/// One row per proved answer candidate; positive when it matches gold.
pub fn answer_training_set(engine: &Engine, gold: &[GoldItem]) -> TrainingSet {
    let mut rows = Vec::new();
    for item in gold {
        let Ok(parsed) = engine.parse(&item.question) else {
            continue;
        };
        let mut stats = AskStats::default();
        let candidates = engine.collect_candidates(
            &parsed,
            &item.question,
            &AskOptions::default(),
            &mut stats,
            Instant::now(),
        );
        for c in candidates {
            let passage = engine.passage(&c.passage_id).expect("candidate passage exists");
            let positive = matches_gold(&render_answer(&c.bindings, &passage.text), item);
            rows.push((c.features.to_vec(), positive));
        }
    }
    TrainingSet::new(ModelKind::Answer, rows)
}
