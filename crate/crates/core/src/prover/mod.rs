//! Hypertableau model-generation prover.
//!
//! [`compile_problem`] turns background rules, a passage's facts and a query
//! into range-restricted clauses with an answer rule `__ans(vars) :- query`;
//! [`saturate`] builds the tableau and reads answers off the `__ans` atoms of
//! open branches.

mod compile;
mod saturate;

use std::fmt;
use std::time::Duration;

use crate::logic::{Clause, Query, Substitution};

pub use compile::{answer_rule, compile_problem, dump_lkb, validate_input, CompileError};
pub use saturate::{saturate, saturate_with_mode};

/// Resource bounds for one proof attempt.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_level: usize,
    pub time_budget: Duration,
    pub max_branches: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_level: 12,
            time_budget: Duration::from_millis(200),
            max_branches: 64,
        }
    }
}

impl Limits {
    /// Level-bounded limits without a practical time bound, for reproducible
    /// runs.
    pub fn unbounded_time(max_level: usize, max_branches: usize) -> Limits {
        Limits {
            max_level,
            time_budget: Duration::from_secs(3600),
            max_branches,
        }
    }
}

/// How answers from several open branches are combined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AnswerMode {
    /// Holds in at least one open branch.
    #[default]
    Brave,
    /// Holds in every open branch.
    Cautious,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProofStatus {
    AnswersFound,
    SaturatedNoAnswer,
    BudgetExhausted,
    KbInconsistent,
}

impl fmt::Display for ProofStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProofStatus::AnswersFound => "answers_found",
            ProofStatus::SaturatedNoAnswer => "saturated_no_answer",
            ProofStatus::BudgetExhausted => "budget_exhausted",
            ProofStatus::KbInconsistent => "kb_inconsistent",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Answer {
    /// Restricted to the query's answer variables.
    pub bindings: Substitution,
    /// Level of the `__ans` atom.
    pub proof_level: usize,
    pub passage_support: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ProofStats {
    /// Distinct non-fact atoms derived over all explored branches.
    pub derived_atom_count: usize,
    /// How many of those trace back to a passage fact.
    pub passage_derived_count: usize,
    pub split_count: usize,
    pub branches: usize,
    pub open_branches: usize,
    pub firings: usize,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProofResult {
    pub status: ProofStatus,
    pub answers: Vec<Answer>,
    pub stats: ProofStats,
}

impl ProofResult {
    pub fn found(&self) -> bool {
        self.status == ProofStatus::AnswersFound
    }
}

/// Compiles and saturates one candidate: background knowledge plus the
/// passage's facts against the query.
pub fn prove(
    background: &[Clause],
    passage_facts: &[Clause],
    query: &Query,
    limits: &Limits,
) -> Result<ProofResult, CompileError> {
    prove_with_mode(background, passage_facts, query, limits, AnswerMode::Brave)
}

pub fn prove_with_mode(
    background: &[Clause],
    passage_facts: &[Clause],
    query: &Query,
    limits: &Limits,
    mode: AnswerMode,
) -> Result<ProofResult, CompileError> {
    let clauses = compile_problem(background, passage_facts, query)?;
    Ok(saturate_with_mode(&clauses, limits, mode))
}
