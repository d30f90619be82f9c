use std::collections::HashMap;
use std::path::Path;

use super::text::{lexeme, tokenize};

/// Synonym classes over lexemes. Each lexeme maps to the first member of
/// its class.
#[derive(Clone, Debug, Default)]
pub struct SynonymLexicon {
    canonical: HashMap<String, String>,
}

impl SynonymLexicon {
    pub fn empty() -> Self {
        Self::default()
    }

    /// One class per line, comma-separated; blank lines and `#` comments
    /// ignored. Entries are normalized to lexemes; multi-word entries are
    /// joined with `_`.
    pub fn parse(text: &str) -> SynonymLexicon {
        let mut lex = SynonymLexicon::default();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let members: Vec<String> = line
                .split(',')
                .map(|m| tokenize(m).iter().map(|t| lexeme(t)).collect::<Vec<_>>().join("_"))
                .filter(|m| !m.is_empty())
                .collect();
            let Some(first) = members.first() else { continue };
            let head = lex.canonical(first).to_string();
            for m in &members {
                lex.canonical.entry(m.clone()).or_insert_with(|| head.clone());
            }
        }
        lex
    }

    pub fn load(path: impl AsRef<Path>) -> std::io::Result<SynonymLexicon> {
        Ok(Self::parse(&std::fs::read_to_string(path)?))
    }

    pub fn canonical<'a>(&'a self, lexeme: &'a str) -> &'a str {
        self.canonical.get(lexeme).map(String::as_str).unwrap_or(lexeme)
    }

    pub fn len(&self) -> usize {
        self.canonical.len()
    }

    pub fn is_empty(&self) -> bool {
        self.canonical.is_empty()
    }
}
