use std::collections::{BTreeSet, HashMap};

use super::lexicon::SynonymLexicon;
use super::passage::Passage;
use super::text::{analyze, is_stopword, lexeme};

pub const BM25_K1: f64 = 1.2;
pub const BM25_B: f64 = 0.75;

/// Position of a passage in the index; documents are numbered in ascending
/// passage-id order, so postings sorted by `DocId` are sorted by id.
pub type DocId = usize;

#[derive(Clone, Debug)]
pub struct IndexedPassage {
    pub id: String,
    pub token_count: usize,
    term_freq: HashMap<String, u32>,
    /// Canonical content lexemes (stopwords removed, synonyms merged).
    pub lexemes: BTreeSet<String>,
    /// Lowercased proper-name candidates.
    pub proper_names: BTreeSet<String>,
}

impl IndexedPassage {
    pub fn term_frequency(&self, token: &str) -> u32 {
        self.term_freq.get(token).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IndexError {
    #[error("duplicate passage id {0:?}")]
    DuplicateId(String),
}

/// In-memory inverted index over passage tokens.
#[derive(Clone, Debug, Default)]
pub struct InvertedIndex {
    postings: HashMap<String, Vec<(DocId, u32)>>,
    df: HashMap<String, usize>,
    docs: Vec<IndexedPassage>,
    by_id: HashMap<String, DocId>,
    avg_len: f64,
    lexicon: SynonymLexicon,
}

/// Canonical content lexemes of a token stream.
pub(crate) fn content_lexemes<'a>(
    tokens: impl IntoIterator<Item = &'a str>,
    lexicon: &SynonymLexicon,
) -> BTreeSet<String> {
    tokens
        .into_iter()
        .filter(|t| !is_stopword(t))
        .map(|t| {
            let lx = lexeme(t);
            lexicon.canonical(&lx).to_string()
        })
        .collect()
}

impl InvertedIndex {
    pub fn build(passages: &[Passage], lexicon: SynonymLexicon) -> Result<InvertedIndex, IndexError> {
        let mut order: Vec<&Passage> = passages.iter().collect();
        order.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(w) = order.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(IndexError::DuplicateId(w[0].id.clone()));
        }

        let mut index = InvertedIndex {
            lexicon,
            ..Default::default()
        };
        for (doc, passage) in order.into_iter().enumerate() {
            let tokens = analyze(&passage.text);
            let mut term_freq: HashMap<String, u32> = HashMap::new();
            for t in &tokens {
                *term_freq.entry(t.text.clone()).or_default() += 1;
            }
            let mut terms: Vec<(&String, &u32)> = term_freq.iter().collect();
            terms.sort();
            for (term, tf) in terms {
                index.postings.entry(term.clone()).or_default().push((doc, *tf));
                *index.df.entry(term.clone()).or_default() += 1;
            }
            index.docs.push(IndexedPassage {
                id: passage.id.clone(),
                token_count: tokens.len(),
                lexemes: content_lexemes(tokens.iter().map(|t| t.text.as_str()), &index.lexicon),
                proper_names: tokens
                    .iter()
                    .filter(|t| t.proper_candidate)
                    .map(|t| t.text.clone())
                    .collect(),
                term_freq,
            });
            index.by_id.insert(passage.id.clone(), doc);
        }
        if !index.docs.is_empty() {
            index.avg_len = index.docs.iter().map(|d| d.token_count).sum::<usize>() as f64 / index.docs.len() as f64;
        }
        Ok(index)
    }

    pub fn doc_count(&self) -> usize {
        self.docs.len()
    }

    pub fn avg_len(&self) -> f64 {
        self.avg_len
    }

    pub fn df(&self, token: &str) -> usize {
        self.df.get(token).copied().unwrap_or(0)
    }

    pub fn postings(&self, token: &str) -> &[(DocId, u32)] {
        self.postings.get(token).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn vocabulary(&self) -> impl Iterator<Item = &str> {
        self.postings.keys().map(String::as_str)
    }

    pub fn docs(&self) -> &[IndexedPassage] {
        &self.docs
    }

    pub fn doc(&self, doc: DocId) -> &IndexedPassage {
        &self.docs[doc]
    }

    pub fn lookup(&self, passage_id: &str) -> Option<DocId> {
        self.by_id.get(passage_id).copied()
    }

    pub fn lexicon(&self) -> &SynonymLexicon {
        &self.lexicon
    }

    /// `ln(1 + (N − df + 0.5)/(df + 0.5))`
    pub fn idf(&self, token: &str) -> f64 {
        let n = self.doc_count() as f64;
        let df = self.df(token) as f64;
        (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
    }

    /// Okapi BM25 of a document for the distinct question tokens.
    pub fn bm25_doc(&self, question_tokens: &[String], doc: DocId) -> f64 {
        let entry = &self.docs[doc];
        let norm = if self.avg_len > 0.0 {
            1.0 - BM25_B + BM25_B * entry.token_count as f64 / self.avg_len
        } else {
            1.0
        };
        let distinct: BTreeSet<&str> = question_tokens.iter().map(String::as_str).collect();
        distinct
            .into_iter()
            .map(|t| {
                let tf = entry.term_frequency(t) as f64;
                if tf == 0.0 {
                    return 0.0;
                }
                self.idf(t) * tf * (BM25_K1 + 1.0) / (tf + BM25_K1 * norm)
            })
            .sum()
    }
}

/// BM25 score of a passage; 0 for unknown passages or no overlap.
pub fn bm25(index: &InvertedIndex, question_tokens: &[String], passage_id: &str) -> f64 {
    index
        .lookup(passage_id)
        .map(|doc| index.bm25_doc(question_tokens, doc))
        .unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn passage(id: &str, text: &str) -> Passage {
        Passage::new(id, text, vec![])
    }

    #[test]
    fn empty_index() {
        let idx = InvertedIndex::build(&[], SynonymLexicon::empty()).unwrap();
        assert_eq!(idx.doc_count(), 0);
        assert_eq!(idx.vocabulary().count(), 0);
        assert_eq!(idx.avg_len(), 0.0);
    }

    #[test]
    fn single_passage_postings() {
        let idx = InvertedIndex::build(&[passage("p", "a b a")], SynonymLexicon::empty()).unwrap();
        assert_eq!(idx.postings("a"), &[(0, 2)]);
        assert_eq!(idx.postings("b"), &[(0, 1)]);
        assert_eq!(idx.avg_len(), 3.0);
        assert_eq!(idx.doc(0).id, "p");
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = InvertedIndex::build(&[passage("p", "a"), passage("p", "b")], SynonymLexicon::empty());
        assert_eq!(err.unwrap_err(), IndexError::DuplicateId("p".into()));
    }

    #[test]
    fn postings_sorted_by_passage_id() {
        let idx = InvertedIndex::build(
            &[passage("p3", "x"), passage("p1", "x y"), passage("p2", "x")],
            SynonymLexicon::empty(),
        )
        .unwrap();
        let ids: Vec<&str> = idx.postings("x").iter().map(|(d, _)| idx.doc(*d).id.as_str()).collect();
        assert_eq!(ids, vec!["p1", "p2", "p3"]);
    }

    #[test]
    fn bm25_zero_without_overlap() {
        let idx = InvertedIndex::build(&[passage("p", "berlin is big")], SynonymLexicon::empty()).unwrap();
        assert_eq!(bm25(&idx, &["paris".to_string()], "p"), 0.0);
        assert_eq!(bm25(&idx, &["berlin".to_string()], "missing"), 0.0);
    }

    #[test]
    fn bm25_positive_when_question_is_passage() {
        let idx = InvertedIndex::build(&[passage("p", "berlin is big")], SynonymLexicon::empty()).unwrap();
        let q: Vec<String> = ["berlin", "is", "big"].iter().map(|s| s.to_string()).collect();
        assert!(bm25(&idx, &q, "p") > 0.0);
    }
}
