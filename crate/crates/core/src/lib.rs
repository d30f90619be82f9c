//! Logic-based question answering over a passage corpus.
//!
//! A question is translated into a conjunctive query, lexical retrieval and a
//! learned ranker pick candidate passages, a hypertableau prover (with query
//! relaxation) extracts answers from each candidate's facts plus background
//! rules, and a second ranker orders the answers.

pub mod logic;
pub mod parser;
pub mod pipeline;
pub mod prover;
pub mod ranker;
pub mod relax;
pub mod retrieval;
pub mod symbol;

pub use symbol::Symbol;
