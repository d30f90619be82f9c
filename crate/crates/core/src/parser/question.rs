//! Pattern-based translation of controlled-English questions into queries.
//!
//! A pattern file line is `template<TAB>query-template`, e.g.
//!
//! ```text
//! what is the <r> of <e><TAB>?- <r>(<e>, X).
//! ```
//!
//! The first pattern (in file order) whose template matches the tokenized
//! question wins. Slots match one or more tokens, shortest span first; the
//! matched tokens are joined with `_` to form a constant.

use std::fmt;

use super::lexer::SyntaxError;
use super::syntax::{slot_symbol, Parser};
use crate::logic::{Atom, Query, Term};
use crate::retrieval::tokenize;
use crate::symbol::Symbol;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Piece {
    Word(String),
    Slot(String),
}

/// A question template paired with the query it translates to.
#[derive(Clone, Debug)]
pub struct QuestionPattern {
    template: Vec<Piece>,
    query_template: Vec<Atom>,
    answer_var: Option<Symbol>,
    /// The pattern line as written, for diagnostics.
    pub source: String,
}

#[derive(Debug, thiserror::Error)]
pub enum PatternError {
    #[error("line {line}: expected `template<TAB>query`")]
    MissingTab { line: usize },
    #[error("line {line}: empty template")]
    EmptyTemplate { line: usize },
    #[error("line {line}: query template: {source}")]
    Query { line: usize, source: SyntaxError },
    #[error("line {line}: slot <{slot}> used in the query but not in the template")]
    UnboundSlot { line: usize, slot: String },
    #[error("line {line}: at most one answer variable allowed, found {count}")]
    TooManyAnswerVars { line: usize, count: usize },
}

impl QuestionPattern {
    pub fn parse(template: &str, query: &str) -> Result<QuestionPattern, PatternError> {
        Self::parse_at(template, query, 1)
    }

    fn parse_at(template: &str, query: &str, line: usize) -> Result<QuestionPattern, PatternError> {
        let mut pieces = Vec::new();
        for word in template.split_whitespace() {
            match word.strip_prefix('<').and_then(|w| w.strip_suffix('>')) {
                Some(slot) if !slot.is_empty() => pieces.push(Piece::Slot(slot.to_string())),
                _ => pieces.extend(tokenize(word).into_iter().map(Piece::Word)),
            }
        }
        if pieces.is_empty() {
            return Err(PatternError::EmptyTemplate { line });
        }

        let parsed = Parser::new(query, true)
            .and_then(|mut p| {
                let q = p.query()?;
                p.finish()?;
                Ok(q)
            })
            .map_err(|source| PatternError::Query { line, source })?;

        let template_slots: Vec<&str> = pieces
            .iter()
            .filter_map(|p| match p {
                Piece::Slot(s) => Some(s.as_str()),
                Piece::Word(_) => None,
            })
            .collect();
        for slot in slots_in(&parsed.subgoals) {
            if !template_slots.contains(&slot.as_str()) {
                return Err(PatternError::UnboundSlot { line, slot });
            }
        }
        if parsed.answer_vars.len() > 1 {
            return Err(PatternError::TooManyAnswerVars {
                line,
                count: parsed.answer_vars.len(),
            });
        }

        Ok(QuestionPattern {
            template: pieces,
            answer_var: parsed.answer_vars.first().copied(),
            query_template: parsed.subgoals,
            source: format!("{template}\t{query}"),
        })
    }

    pub fn answer_var(&self) -> Option<Symbol> {
        self.answer_var
    }

    /// Matches the question tokens; returns slot fills in template order.
    fn match_tokens(&self, tokens: &[String]) -> Option<Vec<(String, Vec<String>)>> {
        let mut fills = Vec::new();
        match_from(&self.template, tokens, &mut fills).then_some(fills)
    }

    fn instantiate(&self, fills: &[(String, Vec<String>)]) -> (Query, Vec<String>) {
        let lookup = |sym: Symbol| -> Symbol {
            let name = sym.as_str();
            fills
                .iter()
                .find(|(slot, _)| slot_symbol(slot) == sym)
                .map(|(_, toks)| Symbol::intern(&toks.join("_")))
                .unwrap_or_else(|| Symbol::intern(name))
        };
        let mut entity_slots = Vec::new();
        let subgoals = self
            .query_template
            .iter()
            .map(|a| Atom {
                pred: lookup(a.pred),
                args: a
                    .args
                    .iter()
                    .map(|t| fill_term(t, &lookup, &mut entity_slots))
                    .collect(),
            })
            .collect();
        let mut entities = Vec::new();
        for (slot, toks) in fills {
            if entity_slots.contains(&slot_symbol(slot)) {
                let joined = toks.join("_");
                if !entities.contains(&joined) {
                    entities.push(joined);
                }
            }
        }
        (Query::new(subgoals), entities)
    }
}

fn fill_term(term: &Term, lookup: &impl Fn(Symbol) -> Symbol, entity_slots: &mut Vec<Symbol>) -> Term {
    match term {
        Term::Var(_) => term.clone(),
        Term::Const(c) => {
            if c.as_str().starts_with('<') {
                entity_slots.push(*c);
            }
            Term::Const(lookup(*c))
        }
        Term::App(f, args) => Term::App(
            lookup(*f),
            args.iter().map(|t| fill_term(t, lookup, entity_slots)).collect(),
        ),
    }
}

fn slots_in(atoms: &[Atom]) -> Vec<String> {
    fn walk(t: &Term, out: &mut Vec<String>) {
        match t {
            Term::Var(_) => {}
            Term::Const(c) => push_slot(*c, out),
            Term::App(f, args) => {
                push_slot(*f, out);
                args.iter().for_each(|a| walk(a, out));
            }
        }
    }
    fn push_slot(s: Symbol, out: &mut Vec<String>) {
        if let Some(name) = s.as_str().strip_prefix('<').and_then(|n| n.strip_suffix('>')) {
            if !out.iter().any(|o| o == name) {
                out.push(name.to_string());
            }
        }
    }
    let mut out = Vec::new();
    for a in atoms {
        push_slot(a.pred, &mut out);
        a.args.iter().for_each(|t| walk(t, &mut out));
    }
    out
}

fn match_from(pieces: &[Piece], tokens: &[String], fills: &mut Vec<(String, Vec<String>)>) -> bool {
    let Some((first, rest)) = pieces.split_first() else {
        return tokens.is_empty();
    };
    match first {
        Piece::Word(w) => tokens.first() == Some(w) && match_from(rest, &tokens[1..], fills),
        Piece::Slot(name) => {
            // a repeated slot must match the same span again
            if let Some((_, bound)) = fills.iter().find(|(n, _)| n == name) {
                let bound = bound.clone();
                return tokens.starts_with(&bound) && match_from(rest, &tokens[bound.len()..], fills);
            }
            for len in 1..=tokens.len() {
                fills.push((name.clone(), tokens[..len].to_vec()));
                if match_from(rest, &tokens[len..], fills) {
                    return true;
                }
                fills.pop();
            }
            false
        }
    }
}

impl fmt::Display for QuestionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

/// Parses a pattern file: `template<TAB>query-template` per line, `#`
/// comments, blank lines ignored.
pub fn parse_patterns(text: &str) -> Result<Vec<QuestionPattern>, PatternError> {
    let mut patterns = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (template, query) = line
            .split_once('\t')
            .ok_or(PatternError::MissingTab { line: idx + 1 })?;
        patterns.push(QuestionPattern::parse_at(template.trim(), query.trim(), idx + 1)?);
    }
    Ok(patterns)
}

/// The result of translating a question.
#[derive(Clone, Debug)]
pub struct ParsedQuestion {
    pub query: Query,
    /// Constants filled into argument positions (the question's entities).
    pub entities: Vec<String>,
    pub pattern_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuestionError {
    #[error("question not understood")]
    NoPatternMatch,
}

/// Translates a question with the first matching pattern.
pub fn parse_question(question: &str, patterns: &[QuestionPattern]) -> Result<ParsedQuestion, QuestionError> {
    let tokens = tokenize(question.trim().trim_end_matches('?'));
    if tokens.is_empty() {
        return Err(QuestionError::NoPatternMatch);
    }
    for (pattern_index, pattern) in patterns.iter().enumerate() {
        if let Some(fills) = pattern.match_tokens(&tokens) {
            let (query, entities) = pattern.instantiate(&fills);
            return Ok(ParsedQuestion {
                query,
                entities,
                pattern_index,
            });
        }
    }
    Err(QuestionError::NoPatternMatch)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn patterns() -> Vec<QuestionPattern> {
        parse_patterns(
            "# comment\n\
             what is the <r> of <e>\t?- <r>(<e>, X).\n\
             who wrote <e>\t?- wrote(X, <e>).\n\
             is <e> a <c>\t?- <c>(<e>).\n",
        )
        .unwrap()
    }

    #[test]
    fn single_slot_fill() {
        let q = parse_question("What is the capital of Germany?", &patterns()).unwrap();
        assert_eq!(q.query.to_string(), "?- capital(germany, X).");
        assert_eq!(q.entities, vec!["germany"]);
        assert_eq!(q.pattern_index, 0);
    }

    #[test]
    fn variable_first_position() {
        let q = parse_question("Who wrote Faust?", &patterns()).unwrap();
        assert_eq!(q.query.to_string(), "?- wrote(X, faust).");
    }

    #[test]
    fn multi_token_spans_joined() {
        let q = parse_question("What is the capital of the United States?", &patterns()).unwrap();
        assert_eq!(q.query.to_string(), "?- capital(the_united_states, X).");
        let q = parse_question("what is the population density of Koblenz-Landau", &patterns()).unwrap();
        assert_eq!(q.query.to_string(), "?- population_density(koblenz_landau, X).");
    }

    #[test]
    fn ground_question() {
        let q = parse_question("Is Berlin a city?", &patterns()).unwrap();
        assert!(q.query.is_ground());
        assert_eq!(q.query.to_string(), "?- city(berlin).");
    }

    #[test]
    fn no_pattern_match() {
        assert_eq!(
            parse_question("Colorless green ideas?", &patterns()).unwrap_err(),
            QuestionError::NoPatternMatch
        );
        assert!(parse_question("?", &patterns()).is_err());
    }

    #[test]
    fn first_pattern_wins() {
        let ps = parse_patterns("who wrote <e>\t?- wrote(X, <e>).\nwho <v> <e>\t?- <v>(X, <e>).\n").unwrap();
        let q = parse_question("who wrote faust", &ps).unwrap();
        assert_eq!(q.pattern_index, 0);
        let q = parse_question("who painted guernica", &ps).unwrap();
        assert_eq!(q.query.to_string(), "?- painted(X, guernica).");
    }

    #[test]
    fn pattern_validation() {
        assert!(matches!(
            QuestionPattern::parse("who wrote <e>", "?- wrote(X, <f>)."),
            Err(PatternError::UnboundSlot { .. })
        ));
        assert!(matches!(
            QuestionPattern::parse("who met <e>", "?- met(X, Y, <e>)."),
            Err(PatternError::TooManyAnswerVars { .. })
        ));
        assert!(matches!(
            parse_patterns("no tab here"),
            Err(PatternError::MissingTab { line: 1 })
        ));
    }
}
