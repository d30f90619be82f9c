use std::fmt;
use std::sync::Arc;

use super::subst::{Substitutable, Substitution};
use super::term::Atom;
use crate::symbol::Symbol;

/// Where a clause came from.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub enum Origin {
    #[default]
    Background,
    Passage(Arc<str>),
    /// Generated during problem compilation (domain facts, equality axioms,
    /// the answer rule).
    Internal,
}

impl Origin {
    pub fn passage(id: &str) -> Origin {
        Origin::Passage(Arc::from(id))
    }

    pub fn is_passage(&self) -> bool {
        matches!(self, Origin::Passage(_))
    }
}

/// A positive clause `h1 ; ... ; hn :- b1, ..., bm`.
///
/// An empty head is an integrity constraint; an empty body is a fact.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Clause {
    pub head: Vec<Atom>,
    pub body: Vec<Atom>,
    pub origin: Origin,
}

impl Clause {
    pub fn new(head: Vec<Atom>, body: Vec<Atom>) -> Clause {
        Clause {
            head,
            body,
            origin: Origin::Background,
        }
    }

    pub fn fact(atom: Atom) -> Clause {
        Clause::new(vec![atom], Vec::new())
    }

    pub fn with_origin(mut self, origin: Origin) -> Clause {
        self.origin = origin;
        self
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    pub fn is_constraint(&self) -> bool {
        self.head.is_empty()
    }

    pub fn is_ground(&self) -> bool {
        self.head.iter().chain(&self.body).all(Atom::is_ground)
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.head.iter().chain(&self.body)
    }

    pub fn body_vars(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        self.body.iter().for_each(|a| a.collect_vars(&mut out));
        out
    }

    pub fn head_vars(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        self.head.iter().for_each(|a| a.collect_vars(&mut out));
        out
    }

    /// Every head variable also occurs in the body.
    pub fn is_range_restricted(&self) -> bool {
        let body = self.body_vars();
        self.head_vars().iter().all(|v| body.contains(v))
    }
}

impl Substitutable for Clause {
    fn substitute(&self, subst: &Substitution) -> Self {
        Clause {
            head: self.head.iter().map(|a| subst.apply_atom(a)).collect(),
            body: self.body.iter().map(|a| subst.apply_atom(a)).collect(),
            origin: self.origin.clone(),
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.head.is_empty() {
            write!(f, "false")?;
        }
        for (i, a) in self.head.iter().enumerate() {
            if i > 0 {
                write!(f, " ; ")?;
            }
            write!(f, "{a}")?;
        }
        if !self.body.is_empty() {
            write!(f, " :- ")?;
            write_conjunction(f, &self.body)?;
        }
        write!(f, ".")
    }
}

/// A conjunctive query with distinguished answer variables.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Query {
    pub subgoals: Vec<Atom>,
    pub answer_vars: Vec<Symbol>,
}

impl Query {
    /// Query whose answer variables are all variables of `subgoals`, in
    /// first-occurrence order.
    pub fn new(subgoals: Vec<Atom>) -> Query {
        let mut answer_vars = Vec::new();
        subgoals.iter().for_each(|a| a.collect_vars(&mut answer_vars));
        Query { subgoals, answer_vars }
    }

    pub fn vars(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        self.subgoals.iter().for_each(|a| a.collect_vars(&mut out));
        out
    }

    pub fn is_ground(&self) -> bool {
        self.answer_vars.is_empty() && self.subgoals.iter().all(Atom::is_ground)
    }
}

impl Substitutable for Query {
    fn substitute(&self, subst: &Substitution) -> Self {
        let subgoals: Vec<Atom> = self.subgoals.iter().map(|a| subst.apply_atom(a)).collect();
        let mut remaining = Vec::new();
        subgoals.iter().for_each(|a| a.collect_vars(&mut remaining));
        let answer_vars = self
            .answer_vars
            .iter()
            .copied()
            .filter(|v| remaining.contains(v))
            .collect();
        Query { subgoals, answer_vars }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?- ")?;
        write_conjunction(f, &self.subgoals)?;
        write!(f, ".")
    }
}

fn write_conjunction(f: &mut fmt::Formatter<'_>, atoms: &[Atom]) -> fmt::Result {
    for (i, a) in atoms.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}
