//! Query relaxation: drop the least-supported subgoal and retry.

use std::collections::HashMap;

use crate::logic::{Atom, Clause, Query};
use crate::prover::{prove, CompileError, Limits, ProofResult};
use crate::symbol::Symbol;

pub const DEFAULT_MAX_RELAX: usize = 2;

/// Number of unit facts per predicate.
pub type KbStats = HashMap<Symbol, usize>;

pub fn kb_stats<'a>(clauses: impl IntoIterator<Item = &'a Clause>) -> KbStats {
    let mut stats = KbStats::new();
    for c in clauses {
        if c.is_fact() && c.head.len() == 1 {
            *stats.entry(c.head[0].pred).or_default() += 1;
        }
    }
    stats
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelaxedQuery {
    pub query: Query,
    pub dropped: Vec<Atom>,
    pub relax_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RelaxError {
    #[error("no subgoal of {0} can be dropped")]
    NothingDroppable(Query),
}

impl RelaxedQuery {
    pub fn new(query: Query) -> RelaxedQuery {
        RelaxedQuery {
            query,
            dropped: Vec::new(),
            relax_count: 0,
        }
    }

    /// Positions whose removal leaves at least one subgoal and every answer
    /// variable.
    pub fn droppable(&self) -> Vec<usize> {
        let goals = &self.query.subgoals;
        if goals.len() < 2 {
            return Vec::new();
        }
        (0..goals.len())
            .filter(|&i| {
                let mut rest = Vec::new();
                goals
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .for_each(|(_, a)| a.collect_vars(&mut rest));
                self.query.answer_vars.iter().all(|v| rest.contains(v))
            })
            .collect()
    }
}

/// Drops the droppable subgoal with the fewest supporting facts; the
/// rightmost one wins ties.
pub fn relax_once(rq: &RelaxedQuery, stats: &KbStats) -> Result<RelaxedQuery, RelaxError> {
    let support = |i: usize| stats.get(&rq.query.subgoals[i].pred).copied().unwrap_or(0);
    let pick = rq
        .droppable()
        .into_iter()
        .min_by(|a, b| support(*a).cmp(&support(*b)).then(b.cmp(a)))
        .ok_or_else(|| RelaxError::NothingDroppable(rq.query.clone()))?;

    let mut subgoals = rq.query.subgoals.clone();
    let removed = subgoals.remove(pick);
    let mut dropped = rq.dropped.clone();
    dropped.push(removed);
    Ok(RelaxedQuery {
        query: Query {
            subgoals,
            answer_vars: rq.query.answer_vars.clone(),
        },
        relax_count: dropped.len(),
        dropped,
    })
}

#[derive(Clone, Debug)]
pub struct RelaxedProof {
    pub result: ProofResult,
    pub relaxed: RelaxedQuery,
}

impl RelaxedProof {
    pub fn relax_count(&self) -> usize {
        self.relaxed.relax_count
    }
}

/// Proves `query`, relaxing it up to `max_relax` times while no answer is
/// found. Every attempt gets the full time budget of `limits`.
pub fn prove_with_relaxation(
    background: &[Clause],
    passage_facts: &[Clause],
    query: &Query,
    limits: &Limits,
    max_relax: usize,
) -> Result<RelaxedProof, CompileError> {
    let stats = kb_stats(background.iter().chain(passage_facts));
    let mut relaxed = RelaxedQuery::new(query.clone());
    loop {
        let result = prove(background, passage_facts, &relaxed.query, limits)?;
        if result.found() || relaxed.relax_count >= max_relax {
            return Ok(RelaxedProof { result, relaxed });
        }
        match relax_once(&relaxed, &stats) {
            Ok(next) => relaxed = next,
            Err(RelaxError::NothingDroppable(_)) => return Ok(RelaxedProof { result, relaxed }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Origin;
    use crate::parser::{parse_kb, parse_query};
    use crate::prover::ProofStatus;

    fn stats(pairs: &[(&str, usize)]) -> KbStats {
        pairs.iter().map(|(p, n)| (Symbol::intern(p), *n)).collect()
    }

    #[test]
    fn drops_zero_support_subgoal() {
        let rq = RelaxedQuery::new(parse_query("?- born_in(X, Y), city(Y).").unwrap());
        let out = relax_once(&rq, &stats(&[("born_in", 3)])).unwrap();
        assert_eq!(out.query.to_string(), "?- born_in(X, Y).");
        assert_eq!(out.dropped[0].to_string(), "city(Y)");
        assert_eq!(out.relax_count, 1);
        assert_eq!(out.query.answer_vars, rq.query.answer_vars);
    }

    #[test]
    fn single_subgoal_not_droppable() {
        let rq = RelaxedQuery::new(parse_query("?- p(X).").unwrap());
        assert!(matches!(
            relax_once(&rq, &KbStats::new()),
            Err(RelaxError::NothingDroppable(_))
        ));
    }

    #[test]
    fn equal_support_drops_rightmost() {
        let rq = RelaxedQuery::new(parse_query("?- a(X), b(X), c(X).").unwrap());
        let s = stats(&[("a", 2), ("b", 2), ("c", 2)]);
        let once = relax_once(&rq, &s).unwrap();
        assert_eq!(once.query.to_string(), "?- a(X), b(X).");
        let twice = relax_once(&once, &s).unwrap();
        assert_eq!(twice.query.to_string(), "?- a(X).");
        assert_eq!(twice.relax_count, 2);
        assert!(relax_once(&twice, &s).is_err());
    }

    #[test]
    fn answer_variables_are_never_orphaned() {
        // dropping q(X) would lose X even though it has the least support
        let rq = RelaxedQuery::new(Query {
            subgoals: parse_query("?- q(X), r(Y).").unwrap().subgoals,
            answer_vars: vec![Symbol::intern("X")],
        });
        let out = relax_once(&rq, &stats(&[("r", 5)])).unwrap();
        assert_eq!(out.dropped[0].to_string(), "r(Y)");
    }

    #[test]
    fn relaxation_recovers_answer() {
        let facts = parse_kb("capital(germany, berlin).", Origin::passage("p1")).unwrap();
        let q = parse_query("?- capital(germany, X), city(X).").unwrap();
        let limits = Limits::default();
        let out = prove_with_relaxation(&[], &facts, &q, &limits, DEFAULT_MAX_RELAX).unwrap();
        assert_eq!(out.result.status, ProofStatus::AnswersFound);
        assert_eq!(out.relax_count(), 1);
        assert_eq!(out.relaxed.dropped[0].to_string(), "city(X)");

        let none = prove_with_relaxation(&[], &facts, &q, &limits, 0).unwrap();
        assert_eq!(none.result.status, ProofStatus::SaturatedNoAnswer);
        assert_eq!(none.relax_count(), 0);

        let full = parse_query("?- capital(germany, X).").unwrap();
        assert_eq!(
            prove_with_relaxation(&[], &facts, &full, &limits, 2)
                .unwrap()
                .relax_count(),
            0
        );
    }
}
