//! Text formats: clauses, queries, knowledge-base files, corpora and
//! question patterns.

mod corpus;
mod lexer;
mod question;
mod syntax;

pub use corpus::{load_corpus, parse_corpus, CorpusError};
pub use lexer::SyntaxError;
pub use question::{parse_patterns, parse_question, ParsedQuestion, PatternError, QuestionError, QuestionPattern};
pub use syntax::{parse_clause, parse_kb, parse_query};
