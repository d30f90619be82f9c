use std::collections::BTreeSet;

use super::index::{content_lexemes, DocId, InvertedIndex};
use super::text::analyze;

/// A question prepared for matching against the index.
#[derive(Clone, Debug)]
pub struct QuestionTerms {
    /// Lowercased tokens, stopwords included (BM25 input).
    pub tokens: Vec<String>,
    pub lexemes: BTreeSet<String>,
    pub proper_names: BTreeSet<String>,
}

impl QuestionTerms {
    pub fn new(question: &str, index: &InvertedIndex) -> QuestionTerms {
        let analyzed = analyze(question);
        QuestionTerms {
            lexemes: content_lexemes(analyzed.iter().map(|t| t.text.as_str()), index.lexicon()),
            proper_names: analyzed
                .iter()
                .filter(|t| t.proper_candidate)
                .map(|t| t.text.clone())
                .collect(),
            tokens: analyzed.into_iter().map(|t| t.text).collect(),
        }
    }
}

/// Per-passage features for the passage ranker.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    pub matching_lexeme_count: usize,
    pub matching_lexeme_ratio: f64,
    pub proper_name_overlap: usize,
    pub bm25: f64,
    pub passage_length_log: f64,
}

impl FeatureVector {
    pub fn to_vec(&self) -> Vec<f64> {
        vec![
            self.matching_lexeme_count as f64,
            self.matching_lexeme_ratio,
            self.proper_name_overlap as f64,
            self.bm25,
            self.passage_length_log,
        ]
    }

    /// The passage shares at least one lexeme or proper name with the question.
    pub fn has_overlap(&self) -> bool {
        self.matching_lexeme_count + self.proper_name_overlap > 0
    }
}

pub fn extract_features(question: &QuestionTerms, doc: DocId, index: &InvertedIndex) -> FeatureVector {
    let entry = index.doc(doc);
    let matching = question.lexemes.intersection(&entry.lexemes).count();
    let ratio = if question.lexemes.is_empty() {
        0.0
    } else {
        matching as f64 / question.lexemes.len() as f64
    };
    FeatureVector {
        matching_lexeme_count: matching,
        matching_lexeme_ratio: ratio,
        proper_name_overlap: question.proper_names.intersection(&entry.proper_names).count(),
        bm25: index.bm25_doc(&question.tokens, doc),
        passage_length_log: (entry.token_count as f64).ln_1p(),
    }
}
