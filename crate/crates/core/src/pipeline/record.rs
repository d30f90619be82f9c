use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::logic::{Substitution, Term};
use crate::retrieval::analyze;

/// One presented answer with its supporting passage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnswerRecord {
    pub answer_text: String,
    pub bindings: BTreeMap<String, String>,
    pub confidence: f64,
    pub passage_id: String,
    pub passage_text: String,
    /// Byte ranges into `passage_text`, ascending and disjoint.
    pub highlight_spans: Vec<(usize, usize)>,
    pub relax_count: usize,
    pub dropped_subgoals: Vec<String>,
}

/// Byte span of the first occurrence of `words` as consecutive tokens.
fn find_phrase(text: &str, words: &[String]) -> Option<(usize, usize)> {
    phrase_spans(text, words).into_iter().next()
}

fn phrase_spans(text: &str, words: &[String]) -> Vec<(usize, usize)> {
    if words.is_empty() {
        return Vec::new();
    }
    let tokens = analyze(text);
    tokens
        .windows(words.len())
        .filter(|w| w.iter().zip(words).all(|(t, word)| t.text == *word))
        .map(|w| (w[0].start, w[w.len() - 1].end))
        .collect()
}

/// Splits a normalized constant back into lowercase words.
pub fn constant_words(constant: &str) -> Vec<String> {
    constant
        .split('_')
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Renders a binding for display: the passage's own spelling when the
/// constant occurs there, otherwise the constant with `_` read as a space.
pub fn render_term(term: &Term, passage_text: &str) -> String {
    match term {
        Term::Const(c) => {
            let name = c.as_str();
            match find_phrase(passage_text, &constant_words(name)) {
                Some((s, e)) => passage_text[s..e].to_string(),
                None => name.replace('_', " "),
            }
        }
        other => other.to_string(),
    }
}

/// Answer text for a set of bindings; an empty set answers a yes/no question.
pub fn render_answer(bindings: &Substitution, passage_text: &str) -> String {
    if bindings.is_empty() {
        return "Yes".to_string();
    }
    bindings
        .iter()
        .map(|(_, t)| render_term(t, passage_text))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Spans of every occurrence of the given constants, matched
/// case-insensitively on token boundaries; overlapping hits are merged.
pub fn highlight_spans<'a>(passage_text: &str, constants: impl IntoIterator<Item = &'a str>) -> Vec<(usize, usize)> {
    let mut spans: Vec<(usize, usize)> = constants
        .into_iter()
        .flat_map(|c| phrase_spans(passage_text, &constant_words(c)))
        .collect();
    spans.sort_unstable();
    let mut merged: Vec<(usize, usize)> = Vec::with_capacity(spans.len());
    for (s, e) in spans {
        match merged.last_mut() {
            Some(last) if s < last.1 => last.1 = last.1.max(e),
            _ => merged.push((s, e)),
        }
    }
    merged
}
