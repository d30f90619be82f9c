use std::fmt;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TokenKind {
    /// Lowercase- or digit-initial name, or a `__`-prefixed reserved name.
    Name(String),
    Var(String),
    /// `<name>` placeholder, only produced when slots are enabled.
    Slot(String),
    LParen,
    RParen,
    Comma,
    Semicolon,
    Period,
    Neck,
    QueryMark,
    Equals,
    End,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Name(s) | TokenKind::Var(s) => write!(f, "'{s}'"),
            TokenKind::Slot(s) => write!(f, "'<{s}>'"),
            TokenKind::LParen => write!(f, "'('"),
            TokenKind::RParen => write!(f, "')'"),
            TokenKind::Comma => write!(f, "','"),
            TokenKind::Semicolon => write!(f, "';'"),
            TokenKind::Period => write!(f, "'.'"),
            TokenKind::Neck => write!(f, "':-'"),
            TokenKind::QueryMark => write!(f, "'?-'"),
            TokenKind::Equals => write!(f, "'='"),
            TokenKind::End => write!(f, "end of input"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub column: usize,
}

/// A lexing or parsing failure at a 1-based line/column.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message} (found {found})")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub found: String,
    pub message: String,
}

pub fn tokenize(input: &str, allow_slots: bool) -> Result<Vec<Token>, SyntaxError> {
    let chars: Vec<char> = input.chars().collect();
    let mut tokens = Vec::new();
    let (mut i, mut line, mut line_start) = (0, 1, 0);

    while i < chars.len() {
        let ch = chars[i];
        let column = i - line_start + 1;

        if ch == '\n' {
            i += 1;
            line += 1;
            line_start = i;
            continue;
        }
        if ch.is_whitespace() {
            i += 1;
            continue;
        }
        if ch == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }

        let simple = match ch {
            '(' => Some(TokenKind::LParen),
            ')' => Some(TokenKind::RParen),
            ',' => Some(TokenKind::Comma),
            ';' => Some(TokenKind::Semicolon),
            '.' => Some(TokenKind::Period),
            '=' => Some(TokenKind::Equals),
            _ => None,
        };
        let kind = if let Some(kind) = simple {
            i += 1;
            kind
        } else if ch == ':' && chars.get(i + 1) == Some(&'-') {
            i += 2;
            TokenKind::Neck
        } else if ch == '?' && chars.get(i + 1) == Some(&'-') {
            i += 2;
            TokenKind::QueryMark
        } else if ch == '<' && allow_slots {
            let start = i + 1;
            let mut end = start;
            while end < chars.len() && is_name_char(chars[end]) {
                end += 1;
            }
            if end == start || chars.get(end) != Some(&'>') {
                return Err(SyntaxError {
                    line,
                    column,
                    found: "'<'".into(),
                    message: "malformed slot, expected <name>".into(),
                });
            }
            let name: String = chars[start..end].iter().collect();
            i = end + 1;
            TokenKind::Slot(name)
        } else if is_name_char(ch) {
            let start = i;
            while i < chars.len() && is_name_char(chars[i]) {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if word.starts_with("__") || ch.is_lowercase() || ch.is_numeric() {
                TokenKind::Name(word)
            } else if ch.is_uppercase() || ch == '_' {
                TokenKind::Var(word)
            } else {
                // caseless scripts: treat as constants
                TokenKind::Name(word)
            }
        } else {
            return Err(SyntaxError {
                line,
                column,
                found: format!("'{ch}'"),
                message: "unexpected character".into(),
            });
        };
        tokens.push(Token { kind, line, column });
    }
    tokens.push(Token {
        kind: TokenKind::End,
        line,
        column: i - line_start + 1,
    });
    Ok(tokens)
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}
