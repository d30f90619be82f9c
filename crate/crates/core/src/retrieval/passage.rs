use crate::logic::Clause;

use super::text::tokenize;

/// A retrievable text snippet together with its logical translation.
#[derive(Clone, Debug, PartialEq)]
pub struct Passage {
    pub id: String,
    pub text: String,
    pub facts: Vec<Clause>,
    pub token_count: usize,
}

impl Passage {
    pub fn new(id: impl Into<String>, text: impl Into<String>, facts: Vec<Clause>) -> Passage {
        let text = text.into();
        Passage {
            id: id.into(),
            token_count: tokenize(&text).len(),
            text,
            facts,
        }
    }
}
