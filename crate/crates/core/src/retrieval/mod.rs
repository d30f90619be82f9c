//! Inverted-index retrieval, passage features and candidate ranking.

mod features;
mod index;
mod lexicon;
mod passage;
mod rank;
mod text;

pub use features::{extract_features, FeatureVector, QuestionTerms};
pub use index::{bm25, DocId, IndexError, IndexedPassage, InvertedIndex, BM25_B, BM25_K1};
pub use lexicon::SynonymLexicon;
pub use passage::Passage;
pub use rank::{rank_passages, RankedPassage, DEFAULT_TOP_K};
pub use text::{analyze, is_stopword, lexeme, tokenize, TextToken};
