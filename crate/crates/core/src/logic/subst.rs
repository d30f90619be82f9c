use std::collections::BTreeMap;
use std::fmt;

use super::term::{Atom, Term};
use crate::symbol::Symbol;

/// An idempotent variable substitution.
///
/// Idempotence is kept by construction: no variable in the domain ever occurs
/// in a bound term, so applying once is the same as applying twice.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Substitution {
    bindings: BTreeMap<Symbol, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a substitution from pairs, binding them in order.
    /// Returns `None` if some pair fails the occurs check.
    pub fn from_pairs<I: IntoIterator<Item = (Symbol, Term)>>(pairs: I) -> Option<Self> {
        let mut s = Self::new();
        for (v, t) in pairs {
            s.bind(v, t)?;
        }
        Some(s)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn get(&self, var: Symbol) -> Option<&Term> {
        self.bindings.get(&var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Symbol, &Term)> {
        self.bindings.iter().map(|(v, t)| (*v, t))
    }

    /// Adds `var ↦ term`, keeping the substitution idempotent.
    ///
    /// The term is first resolved against the current bindings, then the new
    /// binding is pushed into every existing range. Fails on occurs check or
    /// when `var` is already bound to a different term.
    pub fn bind(&mut self, var: Symbol, term: Term) -> Option<()> {
        let term = self.apply_term(&term);
        if let Some(existing) = self.bindings.get(&var) {
            return (existing == &term).then_some(());
        }
        if term == Term::Var(var) {
            return Some(());
        }
        if term.contains_var(var) {
            return None;
        }
        let single = Substitution {
            bindings: BTreeMap::from([(var, term.clone())]),
        };
        for bound in self.bindings.values_mut() {
            if bound.contains_var(var) {
                *bound = single.apply_term(bound);
            }
        }
        self.bindings.insert(var, term);
        Some(())
    }

    /// The substitution equivalent to applying `self` and then `after`.
    ///
    /// Returns `None` when the composite has no idempotent representation,
    /// i.e. when some composed range still mentions a variable of the domain.
    pub fn compose(&self, after: &Substitution) -> Option<Substitution> {
        let mut bindings = BTreeMap::new();
        for (v, t) in &self.bindings {
            let t = after.apply_term(t);
            if t != Term::Var(*v) {
                bindings.insert(*v, t);
            }
        }
        for (v, t) in &after.bindings {
            if !self.bindings.contains_key(v) {
                bindings.insert(*v, t.clone());
            }
        }
        let clash = bindings.values().any(|t| bindings.keys().any(|v| t.contains_var(*v)));
        (!clash).then_some(Substitution { bindings })
    }

    /// Keeps only the bindings of `vars`.
    pub fn restrict(&self, vars: &[Symbol]) -> Substitution {
        Substitution {
            bindings: self
                .bindings
                .iter()
                .filter(|(v, _)| vars.contains(v))
                .map(|(v, t)| (*v, t.clone()))
                .collect(),
        }
    }

    pub fn apply_term(&self, term: &Term) -> Term {
        if self.bindings.is_empty() {
            return term.clone();
        }
        match term {
            Term::Var(v) => self.bindings.get(v).cloned().unwrap_or_else(|| term.clone()),
            Term::Const(_) => term.clone(),
            Term::App(f, args) => Term::App(*f, args.iter().map(|t| self.apply_term(t)).collect()),
        }
    }

    pub fn apply_atom(&self, atom: &Atom) -> Atom {
        Atom {
            pred: atom.pred,
            args: atom.args.iter().map(|t| self.apply_term(t)).collect(),
        }
    }

    pub fn apply<T: Substitutable>(&self, x: &T) -> T {
        x.substitute(self)
    }
}

/// Anything a substitution can be applied to.
pub trait Substitutable {
    fn substitute(&self, subst: &Substitution) -> Self;
}

impl Substitutable for Term {
    fn substitute(&self, subst: &Substitution) -> Self {
        subst.apply_term(self)
    }
}

impl Substitutable for Atom {
    fn substitute(&self, subst: &Substitution) -> Self {
        subst.apply_atom(self)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v} ↦ {t}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// One-sided unification of `pattern` against a ground atom.
///
/// Returns the substitution `σ` with `σ(pattern) = ground`, binding only
/// variables of the pattern, or `None` when no such substitution exists.
pub fn match_atom(pattern: &Atom, ground: &Atom) -> Option<Substitution> {
    if pattern.pred != ground.pred || pattern.args.len() != ground.args.len() {
        return None;
    }
    let mut bindings = BTreeMap::new();
    for (p, g) in pattern.args.iter().zip(&ground.args) {
        if !match_into(p, g, &mut bindings) {
            return None;
        }
    }
    Some(Substitution { bindings })
}

fn match_into(pattern: &Term, ground: &Term, bindings: &mut BTreeMap<Symbol, Term>) -> bool {
    match (pattern, ground) {
        (Term::Var(v), _) => match bindings.get(v) {
            Some(bound) => bound == ground,
            None => {
                // occurs check; only reachable if the precondition is violated
                if ground.contains_var(*v) {
                    return false;
                }
                bindings.insert(*v, ground.clone());
                true
            }
        },
        (Term::Const(a), Term::Const(b)) => a == b,
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| match_into(x, y, bindings))
        }
        _ => false,
    }
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
    fn sym(n: &str) -> Symbol {
        Symbol::intern(n)
    }

    #[test]
    fn match_binds_variable() {
        let s = match_atom(
            &Atom::new("p", vec![v("X"), c("b")]),
            &Atom::new("p", vec![c("a"), c("b")]),
        )
        .unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.get(sym("X")), Some(&c("a")));
    }

    #[test]
    fn match_rejects_conflicting_binding() {
        let r = match_atom(
            &Atom::new("p", vec![v("X"), v("X")]),
            &Atom::new("p", vec![c("a"), c("b")]),
        );
        assert!(r.is_none());
    }

    #[test]
    fn match_nested_terms() {
        let pattern = Atom::new("p", vec![Term::app("f", vec![v("X")]), v("Y")]);
        let ground = Atom::new("p", vec![Term::app("f", vec![c("a")]), Term::app("g", vec![c("a")])]);
        let s = match_atom(&pattern, &ground).unwrap();
        assert_eq!(s.get(sym("X")), Some(&c("a")));
        assert_eq!(s.get(sym("Y")), Some(&Term::app("g", vec![c("a")])));
        assert_eq!(s.apply(&pattern), ground);
    }

    #[test]
    fn match_rejects_predicate_or_arity_mismatch() {
        assert!(match_atom(&Atom::new("p", vec![v("X")]), &Atom::new("q", vec![c("a")])).is_none());
        assert!(match_atom(&Atom::new("p", vec![v("X")]), &Atom::new("p", vec![c("a"), c("b")])).is_none());
        assert!(match_atom(
            &Atom::new("p", vec![Term::app("f", vec![v("X")])]),
            &Atom::new("p", vec![c("a")])
        )
        .is_none());
    }

    #[test]
    fn apply_and_identity() {
        let s = Substitution::from_pairs([(sym("X"), c("a"))]).unwrap();
        assert_eq!(s.apply(&Atom::new("q", vec![v("X")])), Atom::new("q", vec![c("a")]));
        let atom = Atom::new("r", vec![v("X"), Term::app("f", vec![v("Z")])]);
        assert_eq!(Substitution::new().apply(&atom), atom);
    }

    #[test]
    fn compose_matches_sequential_application() {
        let first = Substitution::from_pairs([(sym("X"), Term::app("f", vec![v("Y")]))]).unwrap();
        let second = Substitution::from_pairs([(sym("Y"), c("b"))]).unwrap();
        let target = Atom::new("p", vec![v("X"), v("Y")]);
        let composed = first.compose(&second).unwrap();
        let sequential = second.apply(&first.apply(&target));
        assert_eq!(composed.apply(&target), sequential);
        assert_eq!(sequential, Atom::new("p", vec![Term::app("f", vec![c("b")]), c("b")]));
    }

    #[test]
    fn compose_without_idempotent_form_is_rejected() {
        let first = Substitution::from_pairs([(sym("X"), Term::app("f", vec![v("Y")]))]).unwrap();
        let second = Substitution::from_pairs([(sym("Z"), v("X"))]).unwrap();
        assert!(first.compose(&second).is_none());
    }

    #[test]
    fn bind_keeps_idempotence() {
        let mut s = Substitution::new();
        s.bind(sym("X"), Term::app("f", vec![v("Y")])).unwrap();
        s.bind(sym("Y"), c("b")).unwrap();
        assert_eq!(s.get(sym("X")), Some(&Term::app("f", vec![c("b")])));
        let t = Atom::new("p", vec![v("X"), v("Y"), v("W")]);
        assert_eq!(s.apply(&s.apply(&t)), s.apply(&t));
    }

    #[test]
    fn bind_occurs_check() {
        let mut s = Substitution::new();
        assert!(s.bind(sym("X"), Term::app("f", vec![v("X")])).is_none());
        s.bind(sym("X"), Term::app("f", vec![v("Y")])).unwrap();
        assert!(s.bind(sym("Y"), Term::app("g", vec![v("X")])).is_none());
    }

    #[test]
    fn restrict_keeps_requested_vars() {
        let s = Substitution::from_pairs([(sym("X"), c("a")), (sym("Y"), c("b"))]).unwrap();
        let r = s.restrict(&[sym("Y")]);
        assert_eq!(r.len(), 1);
        assert_eq!(r.get(sym("Y")), Some(&c("b")));
    }
}
