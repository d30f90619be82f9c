use crate::logic::{
    answer_symbol, congruence_axioms, domain_facts, domain_symbol, equality_symbol, range_restrict, Atom, Clause,
    Origin, Query, Signature, SymbolKind, Term,
};
use crate::symbol::Symbol;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error("reserved predicate {pred}/{arity} may not appear in input ({context})")]
    ReservedPredicate {
        pred: Symbol,
        arity: usize,
        context: String,
    },
    #[error("{kind:?} {symbol} used with arities {arities:?}")]
    ArityMismatch {
        symbol: Symbol,
        kind: SymbolKind,
        arities: Vec<usize>,
    },
    #[error("query has no subgoals")]
    EmptyQuery,
}

fn check_reserved(atom: &Atom, context: impl Fn() -> String) -> Result<(), CompileError> {
    let reserved = atom.pred == domain_symbol()
        || atom.pred == answer_symbol()
        || (atom.pred == equality_symbol() && atom.arity() != 2);
    if reserved {
        return Err(CompileError::ReservedPredicate {
            pred: atom.pred,
            arity: atom.arity(),
            context: context(),
        });
    }
    Ok(())
}

/// Checks that user input avoids the reserved predicates and uses every
/// symbol with a single arity.
pub fn validate_input<'a>(
    clauses: impl IntoIterator<Item = &'a Clause>,
    query: Option<&Query>,
) -> Result<Signature, CompileError> {
    let mut signature = Signature::new();
    for clause in clauses {
        for atom in clause.atoms() {
            check_reserved(atom, || clause.to_string())?;
            signature.add_atom(atom);
        }
    }
    if let Some(query) = query {
        if query.subgoals.is_empty() {
            return Err(CompileError::EmptyQuery);
        }
        for atom in &query.subgoals {
            check_reserved(atom, || query.to_string())?;
        }
        signature.add_query(query);
    }
    if let Some((symbol, kind, arities)) = signature.arity_conflicts().into_iter().next() {
        return Err(CompileError::ArityMismatch { symbol, kind, arities });
    }
    Ok(signature)
}

/// The answer rule `__ans(answer_vars) :- subgoals`, range restricted.
pub fn answer_rule(query: &Query) -> Clause {
    let head = Atom {
        pred: answer_symbol(),
        args: query.answer_vars.iter().map(|v| Term::Var(*v)).collect(),
    };
    let rule = Clause::new(vec![head], query.subgoals.clone()).with_origin(Origin::Internal);
    range_restrict(&rule).remove(0)
}

/// Builds the clause set handed to the prover: range-restricted background
/// and passage clauses, equality axioms when `=` is used, one `dom` fact per
/// constant, and the answer rule.
pub fn compile_problem(
    background: &[Clause],
    passage_facts: &[Clause],
    query: &Query,
) -> Result<Vec<Clause>, CompileError> {
    let signature = validate_input(background.iter().chain(passage_facts), Some(query))?;

    let mut out: Vec<Clause> = background
        .iter()
        .chain(passage_facts)
        .flat_map(range_restrict)
        .collect();
    out.extend(congruence_axioms(&signature));
    out.extend(domain_facts(
        background.iter().chain(passage_facts),
        query.subgoals.iter(),
    ));
    out.push(answer_rule(query));
    Ok(out)
}

/// Renders a clause set in knowledge-base syntax, one clause per line.
pub fn dump_lkb(clauses: &[Clause]) -> String {
    let mut out = String::new();
    for c in clauses {
        out.push_str(&c.to_string());
        out.push('\n');
    }
    out
}
