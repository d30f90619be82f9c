use std::fmt;

use crate::symbol::Symbol;

/// A first-order term.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    Var(Symbol),
    Const(Symbol),
    App(Symbol, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Symbol::intern(name))
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(Symbol::intern(name))
    }

    pub fn app(functor: &str, args: Vec<Term>) -> Term {
        Term::App(Symbol::intern(functor), args)
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) => true,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn contains_var(&self, var: Symbol) -> bool {
        match self {
            Term::Var(v) => *v == var,
            Term::Const(_) => false,
            Term::App(_, args) => args.iter().any(|t| t.contains_var(var)),
        }
    }

    /// Pushes variables in first-occurrence order, skipping ones already in `out`.
    pub fn collect_vars(&self, out: &mut Vec<Symbol>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|t| t.collect_vars(out)),
        }
    }

    pub fn collect_constants(&self, out: &mut Vec<Symbol>) {
        match self {
            Term::Var(_) => {}
            Term::Const(c) => {
                if !out.contains(c) {
                    out.push(*c);
                }
            }
            Term::App(_, args) => args.iter().for_each(|t| t.collect_constants(out)),
        }
    }

    /// Calls `f` on every compound subterm's functor and arity.
    pub fn visit_functors(&self, f: &mut impl FnMut(Symbol, usize)) {
        if let Term::App(functor, args) = self {
            f(*functor, args.len());
            args.iter().for_each(|t| t.visit_functors(f));
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) | Term::Const(v) => write!(f, "{v}"),
            Term::App(functor, args) => {
                write!(f, "{functor}(")?;
                write_list(f, args)?;
                write!(f, ")")
            }
        }
    }
}

/// An atomic formula `pred(args...)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Atom {
    pub pred: Symbol,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, args: Vec<Term>) -> Atom {
        Atom {
            pred: Symbol::intern(pred),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn vars(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut Vec<Symbol>) {
        self.args.iter().for_each(|t| t.collect_vars(out));
    }

    pub fn collect_constants(&self, out: &mut Vec<Symbol>) {
        self.args.iter().for_each(|t| t.collect_constants(out));
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pred)?;
        if !self.args.is_empty() {
            write!(f, "(")?;
            write_list(f, &self.args)?;
            write!(f, ")")?;
        }
        Ok(())
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, terms: &[Term]) -> fmt::Result {
    for (i, t) in terms.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{t}")?;
    }
    Ok(())
}
