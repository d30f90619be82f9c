//! Recursive-descent parser for clauses and queries.
//!
//! ```text
//! clause := head [":-" body] "."
//! head   := "false" | atom (";" atom)*
//! query  := "?-" body "."
//! body   := atom ("," atom)*
//! atom   := name ["(" term ("," term)* ")"] | "=" "(" term "," term ")" | term "=" term
//! term   := Var | name ["(" term ("," term)* ")"]
//! ```

use super::lexer::{tokenize, SyntaxError, Token, TokenKind};
use crate::logic::{Atom, Clause, Origin, Query, Term, EQUALITY};
use crate::symbol::Symbol;

pub(crate) struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    anonymous: usize,
}

/// Slot placeholders are represented as symbols spelled `<name>`.
pub(crate) fn slot_symbol(name: &str) -> Symbol {
    Symbol::intern(&format!("<{name}>"))
}

impl Parser {
    pub(crate) fn new(input: &str, allow_slots: bool) -> Result<Parser, SyntaxError> {
        Ok(Parser {
            tokens: tokenize(input, allow_slots)?,
            pos: 0,
            anonymous: 0,
        })
    }

    fn peek(&self) -> &TokenKind {
        &self.tokens[self.pos].kind
    }

    fn next(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if tok.kind != TokenKind::End {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, message: impl Into<String>) -> SyntaxError {
        let tok = &self.tokens[self.pos];
        SyntaxError {
            line: tok.line,
            column: tok.column,
            found: tok.kind.to_string(),
            message: message.into(),
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<(), SyntaxError> {
        if *self.peek() == kind {
            self.next();
            Ok(())
        } else {
            Err(self.error(format!("expected {kind}")))
        }
    }

    pub(crate) fn finish(&mut self) -> Result<(), SyntaxError> {
        if *self.peek() == TokenKind::End {
            Ok(())
        } else {
            Err(self.error("expected end of input"))
        }
    }

    pub(crate) fn clause(&mut self) -> Result<Clause, SyntaxError> {
        let mut head = Vec::new();
        if *self.peek() == TokenKind::Name("false".into()) {
            self.next();
        } else {
            head.push(self.atom()?);
            while *self.peek() == TokenKind::Semicolon {
                self.next();
                head.push(self.atom()?);
            }
        }
        let mut body = Vec::new();
        if *self.peek() == TokenKind::Neck {
            self.next();
            body = self.conjunction()?;
        } else if head.is_empty() {
            return Err(self.error("expected ':-' after 'false'"));
        }
        self.expect(TokenKind::Period)?;
        Ok(Clause::new(head, body))
    }

    pub(crate) fn query(&mut self) -> Result<Query, SyntaxError> {
        self.expect(TokenKind::QueryMark)?;
        if *self.peek() == TokenKind::Period {
            return Err(self.error("query has no subgoals"));
        }
        let subgoals = self.conjunction()?;
        self.expect(TokenKind::Period)?;
        Ok(Query::new(subgoals))
    }

    fn conjunction(&mut self) -> Result<Vec<Atom>, SyntaxError> {
        let mut atoms = vec![self.atom()?];
        while *self.peek() == TokenKind::Comma {
            self.next();
            atoms.push(self.atom()?);
        }
        Ok(atoms)
    }

    fn atom(&mut self) -> Result<Atom, SyntaxError> {
        if *self.peek() == TokenKind::Equals {
            self.next();
            let args = self.arguments()?;
            if args.len() != 2 {
                return Err(self.error("'=' takes exactly two arguments"));
            }
            return Ok(Atom {
                pred: Symbol::intern(EQUALITY),
                args,
            });
        }
        let start = self.pos;
        let term = self.term()?;
        if *self.peek() == TokenKind::Equals {
            self.next();
            let rhs = self.term()?;
            return Ok(Atom {
                pred: Symbol::intern(EQUALITY),
                args: vec![term, rhs],
            });
        }
        match term {
            Term::Const(pred) => Ok(Atom { pred, args: vec![] }),
            Term::App(pred, args) => Ok(Atom { pred, args }),
            Term::Var(_) => {
                self.pos = start;
                Err(self.error("expected an atom, found a variable"))
            }
        }
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        let functor = match self.peek().clone() {
            TokenKind::Var(name) => {
                self.next();
                if name == "_" {
                    self.anonymous += 1;
                    return Ok(Term::Var(Symbol::intern(&format!("_G{}", self.anonymous))));
                }
                return Ok(Term::Var(Symbol::intern(&name)));
            }
            TokenKind::Name(name) => {
                self.next();
                Symbol::intern(&name)
            }
            TokenKind::Slot(name) => {
                self.next();
                slot_symbol(&name)
            }
            _ => return Err(self.error("expected a term")),
        };
        if *self.peek() == TokenKind::LParen {
            let args = self.arguments()?;
            Ok(Term::App(functor, args))
        } else {
            Ok(Term::Const(functor))
        }
    }

    fn arguments(&mut self) -> Result<Vec<Term>, SyntaxError> {
        self.expect(TokenKind::LParen)?;
        let mut args = Vec::new();
        if *self.peek() == TokenKind::RParen {
            self.next();
            return Ok(args);
        }
        loop {
            args.push(self.term()?);
            match self.peek() {
                TokenKind::Comma => {
                    self.next();
                }
                TokenKind::RParen => {
                    self.next();
                    return Ok(args);
                }
                _ => return Err(self.error("expected ',' or ')'")),
            }
        }
    }
}

/// Parses a single clause; the origin is supplied by the caller.
pub fn parse_clause(line: &str, origin: Origin) -> Result<Clause, SyntaxError> {
    let mut p = Parser::new(line, false)?;
    let clause = p.clause()?;
    p.finish()?;
    Ok(clause.with_origin(origin))
}

/// Parses `?- atom, ..., atom.`; answer variables are all query variables in
/// first-occurrence order.
pub fn parse_query(line: &str) -> Result<Query, SyntaxError> {
    let mut p = Parser::new(line, false)?;
    let query = p.query()?;
    p.finish()?;
    Ok(query)
}

/// Parses a knowledge-base text: one clause per line, `%` comments, blank
/// lines ignored. Error positions refer to the whole text.
pub fn parse_kb(text: &str, origin: Origin) -> Result<Vec<Clause>, SyntaxError> {
    let mut clauses = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let mut p = Parser::new(line, false).map_err(|e| at_line(e, idx + 1))?;
        if *p.peek() == TokenKind::End {
            continue;
        }
        let clause = p
            .clause()
            .and_then(|c| p.finish().map(|_| c))
            .map_err(|e| at_line(e, idx + 1))?;
        clauses.push(clause.with_origin(origin.clone()));
    }
    Ok(clauses)
}

fn at_line(mut e: SyntaxError, line: usize) -> SyntaxError {
    e.line = line;
    e
}
