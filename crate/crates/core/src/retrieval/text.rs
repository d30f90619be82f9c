//! Tokenization and lexeme normalization.

use std::collections::HashSet;
use std::sync::OnceLock;

/// A token of the original text with its byte span.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TextToken {
    /// Lowercased surface form.
    pub text: String,
    pub start: usize,
    pub end: usize,
    /// Capitalized and not at the start of a sentence.
    pub proper_candidate: bool,
}

/// Splits on non-alphanumeric characters and lowercases.
pub fn tokenize(text: &str) -> Vec<String> {
    analyze(text).into_iter().map(|t| t.text).collect()
}

/// Tokenizes keeping byte offsets and proper-name candidates.
pub fn analyze(text: &str) -> Vec<TextToken> {
    let mut tokens = Vec::new();
    let mut sentence_start = true;
    let mut current: Option<usize> = None;

    let flush = |start: usize, end: usize, sentence_start: &mut bool, tokens: &mut Vec<TextToken>| {
        let word = &text[start..end];
        let capitalized = word.chars().next().is_some_and(char::is_uppercase);
        tokens.push(TextToken {
            text: word.to_lowercase(),
            start,
            end,
            proper_candidate: capitalized && !*sentence_start,
        });
        *sentence_start = false;
    };

    for (idx, ch) in text.char_indices() {
        if ch.is_alphanumeric() {
            if current.is_none() {
                current = Some(idx);
            }
            continue;
        }
        if let Some(start) = current.take() {
            flush(start, idx, &mut sentence_start, &mut tokens);
        }
        if matches!(ch, '.' | '!' | '?' | '\n') {
            sentence_start = true;
        }
    }
    if let Some(start) = current {
        flush(start, text.len(), &mut sentence_start, &mut tokens);
    }
    tokens
}

/// Minimal suffix stripping: sibilant-final words lose "es", others a final
/// "s" (but not "ss"). Short words are left alone.
pub fn lexeme(token: &str) -> String {
    let n = token.chars().count();
    if n > 4 {
        for suffix in ["ses", "xes", "zes", "ches", "shes"] {
            if token.ends_with(suffix) {
                return token[..token.len() - 2].to_string();
            }
        }
    }
    if n > 3 && token.ends_with('s') && !token.ends_with("ss") && !token.ends_with("us") {
        return token[..token.len() - 1].to_string();
    }
    token.to_string()
}

const STOPWORDS: [&str; 25] = [
    "the", "of", "and", "a", "to", "in", "is", "you", "that", "it", "he", "was", "for", "on", "are", "as", "with",
    "his", "they", "i", "at", "be", "this", "have", "from",
];

pub fn is_stopword(token: &str) -> bool {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| STOPWORDS.into_iter().collect()).contains(token)
}
