//! JSON-lines corpus files: one `{"id", "text", "facts"}` object per line.

use std::collections::HashSet;
use std::path::Path;

use serde::Deserialize;

use super::lexer::SyntaxError;
use super::syntax::parse_clause;
use crate::logic::Origin;
use crate::retrieval::Passage;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    id: String,
    text: String,
    #[serde(default)]
    facts: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot read corpus: {0}")]
    Io(#[from] std::io::Error),
    #[error("record {record}: {message}")]
    Malformed { record: usize, message: String },
    #[error("record {record}: duplicate passage id {id:?}")]
    DuplicateId { record: usize, id: String },
    #[error("record {record}, fact {fact}: {source}")]
    Fact {
        record: usize,
        fact: usize,
        source: SyntaxError,
    },
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<Passage>, CorpusError> {
    parse_corpus(&std::fs::read_to_string(path)?)
}

/// Parses corpus text. Records are numbered from 1 by line; blank lines are
/// skipped but still counted.
pub fn parse_corpus(text: &str) -> Result<Vec<Passage>, CorpusError> {
    let mut passages = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in text.lines().enumerate() {
        let record = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec: Record = serde_json::from_str(line).map_err(|e| CorpusError::Malformed {
            record,
            message: e.to_string(),
        })?;
        if rec.id.is_empty() {
            return Err(CorpusError::Malformed {
                record,
                message: "empty passage id".into(),
            });
        }
        if !seen.insert(rec.id.clone()) {
            return Err(CorpusError::DuplicateId { record, id: rec.id });
        }
        let origin = Origin::passage(&rec.id);
        let facts = rec
            .facts
            .iter()
            .enumerate()
            .map(|(i, f)| {
                parse_clause(f, origin.clone()).map_err(|source| CorpusError::Fact {
                    record,
                    fact: i + 1,
                    source,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        passages.push(Passage::new(rec.id, rec.text, facts));
    }
    Ok(passages)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_single_record() {
        let ps = parse_corpus(
            r#"{"id":"p1","text":"Berlin is the capital of Germany.","facts":["capital(germany,berlin)."]}"#,
        )
        .unwrap();
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].facts.len(), 1);
        assert_eq!(ps[0].facts[0].origin, Origin::passage("p1"));
        assert_eq!(ps[0].token_count, 6);
    }

    #[test]
    fn empty_facts_allowed() {
        let ps = parse_corpus(r#"{"id":"p2","text":"Nothing to prove here.","facts":[]}"#).unwrap();
        assert!(ps[0].facts.is_empty());
    }

    #[test]
    fn duplicate_id_rejected() {
        let text = "{\"id\":\"p1\",\"text\":\"a\",\"facts\":[]}\n{\"id\":\"p1\",\"text\":\"b\",\"facts\":[]}";
        match parse_corpus(text) {
            Err(CorpusError::DuplicateId { record, id }) => {
                assert_eq!(record, 2);
                assert_eq!(id, "p1");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_record_numbered() {
        let text = "{\"id\":\"p1\",\"text\":\"a\",\"facts\":[]}\n\n{\"id\":\"p2\"}";
        assert!(matches!(
            parse_corpus(text),
            Err(CorpusError::Malformed { record: 3, .. })
        ));
        let bad_fact = "{\"id\":\"p1\",\"text\":\"a\",\"facts\":[\"p(a\"]}";
        assert!(matches!(
            parse_corpus(bad_fact),
            Err(CorpusError::Fact { record: 1, fact: 1, .. })
        ));
    }
}
