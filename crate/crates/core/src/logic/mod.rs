//! First-order terms, clauses, substitutions and the clause transformations
//! the prover expects as input.

mod clause;
mod subst;
mod term;
mod transform;

pub use clause::{Clause, Origin, Query};
pub use subst::{match_atom, Substitutable, Substitution};
pub use term::{Atom, Term};
pub use transform::{
    answer_symbol, congruence_axioms, domain_facts, domain_symbol, equality_symbol, range_restrict, Signature,
    SymbolKind, ANSWER, DOMAIN, EQUALITY,
};
