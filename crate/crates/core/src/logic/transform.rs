//! Input transformations for the prover: range restriction, domain facts and
//! equality axioms.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use super::clause::{Clause, Origin, Query};
use super::term::{Atom, Term};
use crate::symbol::Symbol;

pub const EQUALITY: &str = "=";
pub const DOMAIN: &str = "dom";
pub const ANSWER: &str = "__ans";

macro_rules! cached_symbol {
    ($fn_name:ident, $name:expr) => {
        pub fn $fn_name() -> Symbol {
            static SYM: OnceLock<Symbol> = OnceLock::new();
            *SYM.get_or_init(|| Symbol::intern($name))
        }
    };
}

cached_symbol!(equality_symbol, EQUALITY);
cached_symbol!(domain_symbol, DOMAIN);
cached_symbol!(answer_symbol, ANSWER);

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum SymbolKind {
    Predicate,
    Function,
    Constant,
}

/// The symbols of a clause set with their arities.
#[derive(Clone, Default, Debug, PartialEq, Eq)]
pub struct Signature {
    entries: BTreeSet<(Symbol, usize, SymbolKind)>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn of<'a>(clauses: impl IntoIterator<Item = &'a Clause>) -> Signature {
        let mut sig = Signature::new();
        for c in clauses {
            c.atoms().for_each(|a| sig.add_atom(a));
        }
        sig
    }

    pub fn add_query(&mut self, query: &Query) {
        query.subgoals.iter().for_each(|a| self.add_atom(a));
    }

    pub fn add_atom(&mut self, atom: &Atom) {
        self.insert(atom.pred, atom.arity(), SymbolKind::Predicate);
        for t in &atom.args {
            self.add_term(t);
        }
    }

    fn add_term(&mut self, term: &Term) {
        match term {
            Term::Var(_) => {}
            Term::Const(c) => self.insert(*c, 0, SymbolKind::Constant),
            Term::App(f, args) => {
                self.insert(*f, args.len(), SymbolKind::Function);
                args.iter().for_each(|t| self.add_term(t));
            }
        }
    }

    pub fn insert(&mut self, symbol: Symbol, arity: usize, kind: SymbolKind) {
        self.entries.insert((symbol, arity, kind));
    }

    pub fn iter(&self) -> impl Iterator<Item = (Symbol, usize, SymbolKind)> + '_ {
        self.entries.iter().copied()
    }

    pub fn predicates(&self) -> impl Iterator<Item = (Symbol, usize)> + '_ {
        self.of_kind(SymbolKind::Predicate)
    }

    pub fn functions(&self) -> impl Iterator<Item = (Symbol, usize)> + '_ {
        self.of_kind(SymbolKind::Function)
    }

    fn of_kind(&self, kind: SymbolKind) -> impl Iterator<Item = (Symbol, usize)> + '_ {
        self.entries
            .iter()
            .filter(move |(_, _, k)| *k == kind)
            .map(|(s, n, _)| (*s, *n))
    }

    pub fn uses_equality(&self) -> bool {
        self.entries.contains(&(equality_symbol(), 2, SymbolKind::Predicate))
    }

    /// Symbols used with more than one arity within the same kind.
    pub fn arity_conflicts(&self) -> Vec<(Symbol, SymbolKind, Vec<usize>)> {
        let mut out: Vec<(Symbol, SymbolKind, Vec<usize>)> = Vec::new();
        for (s, n, k) in &self.entries {
            match out.iter_mut().find(|(s2, k2, _)| s2 == s && k2 == k) {
                Some((_, _, arities)) => arities.push(*n),
                None => out.push((*s, *k, vec![*n])),
            }
        }
        out.retain(|(_, _, arities)| arities.len() > 1);
        out
    }
}

/// Adds `dom(V)` to the body for each head variable missing from the body.
pub fn range_restrict(clause: &Clause) -> Vec<Clause> {
    let body_vars = clause.body_vars();
    let missing: Vec<Symbol> = clause
        .head_vars()
        .into_iter()
        .filter(|v| !body_vars.contains(v))
        .collect();
    if missing.is_empty() {
        return vec![clause.clone()];
    }
    let mut restricted = clause.clone();
    restricted.body.extend(missing.into_iter().map(|v| Atom {
        pred: domain_symbol(),
        args: vec![Term::Var(v)],
    }));
    vec![restricted]
}

/// `dom(k).` once for every constant in `clauses` (and `extra` atoms), in
/// first-occurrence order.
pub fn domain_facts<'a>(
    clauses: impl IntoIterator<Item = &'a Clause>,
    extra: impl IntoIterator<Item = &'a Atom>,
) -> Vec<Clause> {
    let mut constants = Vec::new();
    for c in clauses {
        c.atoms().for_each(|a| a.collect_constants(&mut constants));
    }
    extra.into_iter().for_each(|a| a.collect_constants(&mut constants));
    constants
        .into_iter()
        .map(|k| {
            Clause::fact(Atom {
                pred: domain_symbol(),
                args: vec![Term::Const(k)],
            })
            .with_origin(Origin::Internal)
        })
        .collect()
}

/// Equality axioms for a signature in which `=`/2 occurs.
///
/// Reflexivity (over `dom`), symmetry, transitivity, and one substitution
/// axiom per argument position of every predicate and function symbol. The
/// reserved predicates get no substitution axioms. Output is range
/// restricted.
pub fn congruence_axioms(signature: &Signature) -> Vec<Clause> {
    if !signature.uses_equality() {
        return Vec::new();
    }
    let eq = |l: Term, r: Term| Atom {
        pred: equality_symbol(),
        args: vec![l, r],
    };
    let (x, y, z) = (Term::var("X"), Term::var("Y"), Term::var("Z"));
    let mut axioms = vec![
        Clause::new(
            vec![eq(x.clone(), x.clone())],
            vec![Atom {
                pred: domain_symbol(),
                args: vec![x.clone()],
            }],
        ),
        Clause::new(vec![eq(y.clone(), x.clone())], vec![eq(x.clone(), y.clone())]),
        Clause::new(
            vec![eq(x.clone(), z.clone())],
            vec![eq(x.clone(), y.clone()), eq(y.clone(), z)],
        ),
    ];

    let reserved = [equality_symbol(), domain_symbol(), answer_symbol()];
    for (pred, arity) in signature.predicates() {
        if reserved.contains(&pred) {
            continue;
        }
        for i in 0..arity {
            let (from, to) = substitution_args(arity, i);
            axioms.push(Clause::new(
                vec![Atom { pred, args: to }],
                vec![
                    Atom { pred, args: from },
                    eq(Term::var(&format!("X{}", i + 1)), Term::var("Y")),
                ],
            ));
        }
    }
    for (functor, arity) in signature.functions() {
        for i in 0..arity {
            let (from, to) = substitution_args(arity, i);
            axioms.push(Clause::new(
                vec![eq(Term::App(functor, from), Term::App(functor, to))],
                vec![eq(Term::var(&format!("X{}", i + 1)), Term::var("Y"))],
            ));
        }
    }
    axioms
        .iter()
        .flat_map(range_restrict)
        .map(|c| c.with_origin(Origin::Internal))
        .collect()
}

// (X1..Xn) and the same with position `i` replaced by Y.
fn substitution_args(arity: usize, i: usize) -> (Vec<Term>, Vec<Term>) {
    let from: Vec<Term> = (1..=arity).map(|k| Term::var(&format!("X{k}"))).collect();
    let mut to = from.clone();
    to[i] = Term::var("Y");
    (from, to)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Term {
        Term::var(n)
    }
    fn c(n: &str) -> Term {
        Term::constant(n)
    }

    #[test]
    fn already_restricted_clause_is_unchanged() {
        let clause = Clause::new(vec![Atom::new("p", vec![c("a")])], vec![Atom::new("q", vec![c("a")])]);
        assert_eq!(range_restrict(&clause), vec![clause]);
    }

    #[test]
    fn head_variable_fact_gets_domain_literal() {
        let clause = Clause::fact(Atom::new("p", vec![v("X")]));
        let out = range_restrict(&clause);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].to_string(), "p(X) :- dom(X).");
        assert!(out[0].is_range_restricted());
    }

    #[test]
    fn disjunctive_head_only_missing_vars_restricted() {
        let clause = Clause::new(
            vec![Atom::new("p", vec![v("X")]), Atom::new("r", vec![v("Y")])],
            vec![Atom::new("q", vec![v("X")])],
        );
        assert_eq!(range_restrict(&clause)[0].to_string(), "p(X) ; r(Y) :- q(X), dom(Y).");
    }

    #[test]
    fn domain_facts_once_per_constant() {
        let kb = [
            Clause::fact(Atom::new("p", vec![c("a"), Term::app("f", vec![c("b")])])),
            Clause::fact(Atom::new("q", vec![c("a")])),
        ];
        let facts: Vec<String> = domain_facts(&kb, []).iter().map(|c| c.to_string()).collect();
        assert_eq!(facts, vec!["dom(a).", "dom(b)."]);
    }

    #[test]
    fn no_equality_no_axioms() {
        let kb = [Clause::fact(Atom::new("p", vec![c("a")]))];
        assert!(congruence_axioms(&Signature::of(&kb)).is_empty());
    }

    #[test]
    fn predicate_substitution_axiom_present() {
        let kb = [
            Clause::fact(Atom::new("p", vec![c("a")])),
            Clause::fact(Atom::new("=", vec![c("a"), c("b")])),
        ];
        let axioms: Vec<String> = congruence_axioms(&Signature::of(&kb))
            .iter()
            .map(|c| c.to_string())
            .collect();
        assert!(axioms.contains(&"p(Y) :- p(X1), =(X1, Y).".to_string()), "{axioms:?}");
        assert!(axioms.contains(&"=(X, X) :- dom(X).".to_string()));
        assert!(axioms.contains(&"=(Y, X) :- =(X, Y).".to_string()));
        assert!(axioms.contains(&"=(X, Z) :- =(X, Y), =(Y, Z).".to_string()));
        // 3 equivalence axioms + one per argument position of p/1
        assert_eq!(axioms.len(), 4);
    }

    #[test]
    fn axiom_count_follows_signature() {
        let kb = [
            Clause::fact(Atom::new("r", vec![c("a"), Term::app("g", vec![c("b"), c("c")])])),
            Clause::fact(Atom::new("s", vec![c("a"), c("b"), c("c")])),
            Clause::fact(Atom::new("=", vec![c("a"), c("b")])),
        ];
        let axioms = congruence_axioms(&Signature::of(&kb));
        // 3 + (r/2: 2, s/3: 3) + (g/2: 2)
        assert_eq!(axioms.len(), 3 + 2 + 3 + 2);
        assert!(axioms.iter().all(Clause::is_range_restricted));
    }

    #[test]
    fn arity_conflicts_detected() {
        let kb = [
            Clause::fact(Atom::new("p", vec![c("a")])),
            Clause::fact(Atom::new("p", vec![c("a"), c("b")])),
        ];
        let conflicts = Signature::of(&kb).arity_conflicts();
        assert_eq!(conflicts.len(), 1);
        assert_eq!(conflicts[0].0, Symbol::intern("p"));
    }
}
