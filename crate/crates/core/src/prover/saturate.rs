//! Hypertableau saturation.
//!
//! Each branch is saturated level by level: round `r` fires every clause
//! whose body is satisfied by atoms of level `< r` with at least one body atom
//! at exactly `r − 1` (semi-naive evaluation), so no clause fires twice with
//! the same grounding on a branch. A satisfied body whose head already holds
//! is skipped. Empty heads close the branch; disjunctive heads are queued and
//! split one at a time, leftmost disjunct explored first.

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use super::{Answer, AnswerMode, Limits, ProofResult, ProofStats, ProofStatus};
use crate::logic::{answer_symbol, domain_symbol, Atom, Clause, Substitution, Term};
use crate::symbol::Symbol;

type AtomId = u32;

#[derive(Clone, Debug)]
enum Pattern {
    Var(u16),
    Const(Symbol),
    App(Symbol, Vec<Pattern>),
}

#[derive(Clone, Debug)]
struct PatternAtom {
    pred: Symbol,
    args: Vec<Pattern>,
}

#[derive(Debug)]
struct Rule {
    head: Vec<PatternAtom>,
    body: Vec<PatternAtom>,
    var_count: usize,
    from_passage: bool,
}

fn compile_term(term: &Term, vars: &mut Vec<Symbol>) -> Pattern {
    match term {
        Term::Var(v) => {
            let idx = vars.iter().position(|x| x == v).unwrap_or_else(|| {
                vars.push(*v);
                vars.len() - 1
            });
            Pattern::Var(idx as u16)
        }
        Term::Const(c) => Pattern::Const(*c),
        Term::App(f, args) => Pattern::App(*f, args.iter().map(|t| compile_term(t, vars)).collect()),
    }
}

fn compile_atom(atom: &Atom, vars: &mut Vec<Symbol>) -> PatternAtom {
    PatternAtom {
        pred: atom.pred,
        args: atom.args.iter().map(|t| compile_term(t, vars)).collect(),
    }
}

impl Rule {
    fn new(clause: &Clause) -> Rule {
        let mut vars = Vec::new();
        // body first so that every head variable is already numbered
        let body = clause.body.iter().map(|a| compile_atom(a, &mut vars)).collect();
        let head = clause.head.iter().map(|a| compile_atom(a, &mut vars)).collect();
        Rule {
            head,
            body,
            var_count: vars.len(),
            from_passage: clause.origin.is_passage(),
        }
    }
}

fn instantiate(pattern: &Pattern, bindings: &[Option<Term>]) -> Term {
    match pattern {
        Pattern::Var(i) => bindings[*i as usize]
            .clone()
            .expect("range-restricted head variable bound by body"),
        Pattern::Const(c) => Term::Const(*c),
        Pattern::App(f, args) => Term::App(*f, args.iter().map(|p| instantiate(p, bindings)).collect()),
    }
}

fn instantiate_atom(pattern: &PatternAtom, bindings: &[Option<Term>]) -> Atom {
    Atom {
        pred: pattern.pred,
        args: pattern.args.iter().map(|p| instantiate(p, bindings)).collect(),
    }
}

/// Matches a pattern against a ground term, recording new bindings on `trail`.
fn match_term(pattern: &Pattern, ground: &Term, bindings: &mut [Option<Term>], trail: &mut Vec<u16>) -> bool {
    match pattern {
        Pattern::Var(i) => match &bindings[*i as usize] {
            Some(bound) => bound == ground,
            None => {
                bindings[*i as usize] = Some(ground.clone());
                trail.push(*i);
                true
            }
        },
        Pattern::Const(c) => matches!(ground, Term::Const(g) if g == c),
        Pattern::App(f, args) => match ground {
            Term::App(g, gargs) if g == f && gargs.len() == args.len() => {
                args.iter().zip(gargs).all(|(p, t)| match_term(p, t, bindings, trail))
            }
            _ => false,
        },
    }
}

/// The ground term a pattern denotes under current bindings, if any.
fn resolve(pattern: &Pattern, bindings: &[Option<Term>]) -> Option<Term> {
    match pattern {
        Pattern::Var(i) => bindings[*i as usize].clone(),
        Pattern::Const(c) => Some(Term::Const(*c)),
        Pattern::App(f, args) => {
            let args = args.iter().map(|p| resolve(p, bindings)).collect::<Option<Vec<_>>>()?;
            Some(Term::App(*f, args))
        }
    }
}

#[derive(Clone, Debug)]
struct AtomRecord {
    atom: Atom,
    level: u32,
    premises: Vec<AtomId>,
    /// Derived from (or is) a passage fact.
    passage: bool,
}

#[derive(Clone, Debug, Default)]
struct PredIndex {
    /// In insertion order, which is also ascending level order.
    all: Vec<AtomId>,
    by_first_arg: HashMap<Term, Vec<AtomId>>,
}

#[derive(Clone, Debug)]
struct Pending {
    atoms: Vec<Atom>,
    level: u32,
    premises: Vec<AtomId>,
    passage: bool,
}

#[derive(Clone, Debug, Default)]
struct Branch {
    atoms: Vec<AtomRecord>,
    lookup: HashMap<Atom, AtomId>,
    by_pred: HashMap<Symbol, PredIndex>,
    pending: Vec<Pending>,
    /// Next level to derive.
    round: u32,
    closed: bool,
    #[cfg(debug_assertions)]
    fired: HashSet<(usize, Vec<AtomId>)>,
}

impl Branch {
    fn contains(&self, atom: &Atom) -> bool {
        self.lookup.contains_key(atom)
    }

    fn add(&mut self, atom: Atom, level: u32, premises: Vec<AtomId>, passage: bool) -> bool {
        if self.lookup.contains_key(&atom) {
            return false;
        }
        let id = self.atoms.len() as AtomId;
        let index = self.by_pred.entry(atom.pred).or_default();
        index.all.push(id);
        if let Some(first) = atom.args.first() {
            index.by_first_arg.entry(first.clone()).or_default().push(id);
        }
        self.lookup.insert(atom.clone(), id);
        self.atoms.push(AtomRecord {
            atom,
            level,
            premises,
            passage,
        });
        true
    }

    fn candidates(&self, pattern: &PatternAtom, bindings: &[Option<Term>]) -> &[AtomId] {
        let Some(index) = self.by_pred.get(&pattern.pred) else {
            return &[];
        };
        if let Some(first) = pattern.args.first().and_then(|p| resolve(p, bindings)) {
            return index.by_first_arg.get(&first).map(Vec::as_slice).unwrap_or(&[]);
        }
        &index.all
    }

    /// Atoms of `pred` at exactly `level`.
    fn at_level(&self, pred: Symbol, level: u32) -> &[AtomId] {
        let Some(index) = self.by_pred.get(&pred) else {
            return &[];
        };
        let lo = index.all.partition_point(|id| self.atoms[*id as usize].level < level);
        let hi = index.all.partition_point(|id| self.atoms[*id as usize].level <= level);
        &index.all[lo..hi]
    }

    fn answer_atoms(&self) -> Vec<AtomId> {
        self.by_pred
            .get(&answer_symbol())
            .map(|i| i.all.clone())
            .unwrap_or_default()
    }

    /// Fraction of the atoms an atom was derived from (transitively, `dom`
    /// excluded) that trace back to passage facts.
    fn passage_support(&self, id: AtomId) -> f64 {
        let mut seen = HashSet::new();
        let mut stack: Vec<AtomId> = self.atoms[id as usize].premises.clone();
        let (mut cone, mut traced) = (0usize, 0usize);
        while let Some(a) = stack.pop() {
            if !seen.insert(a) {
                continue;
            }
            let rec = &self.atoms[a as usize];
            stack.extend(rec.premises.iter().copied());
            if rec.atom.pred == domain_symbol() {
                continue;
            }
            cone += 1;
            if rec.passage {
                traced += 1;
            }
        }
        if cone == 0 {
            0.0
        } else {
            traced as f64 / cone as f64
        }
    }
}

struct Firing {
    rule: usize,
    bindings: Vec<Option<Term>>,
    premises: Vec<AtomId>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Interrupt {
    Timeout,
}

/// Cooperative deadline: checked every few hundred join steps.
struct Clock {
    start: Instant,
    budget: std::time::Duration,
    ticks: u32,
}

impl Clock {
    fn tick(&mut self) -> Result<(), Interrupt> {
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks.is_multiple_of(128) {
            self.check()
        } else {
            Ok(())
        }
    }

    fn check(&self) -> Result<(), Interrupt> {
        if self.start.elapsed() >= self.budget {
            Err(Interrupt::Timeout)
        } else {
            Ok(())
        }
    }
}

/// One semi-naive round: all firings whose body atoms are all below `round`
/// with at least one at `round − 1`.
fn round_firings(rules: &[Rule], branch: &Branch, round: u32, clock: &mut Clock) -> Result<Vec<Firing>, Interrupt> {
    let delta_level = round - 1;
    let mut out = Vec::new();
    for (rule_idx, rule) in rules.iter().enumerate() {
        if rule.body.is_empty() {
            continue;
        }
        for delta_pos in 0..rule.body.len() {
            let delta_atoms = branch.at_level(rule.body[delta_pos].pred, delta_level);
            for &id in delta_atoms {
                clock.tick()?;
                let mut bindings = vec![None; rule.var_count];
                let mut trail = Vec::new();
                if !match_term_list(
                    &rule.body[delta_pos],
                    &branch.atoms[id as usize].atom,
                    &mut bindings,
                    &mut trail,
                ) {
                    continue;
                }
                let mut premises = vec![0; rule.body.len()];
                premises[delta_pos] = id;
                let mut remaining: Vec<usize> = (0..rule.body.len()).filter(|&p| p != delta_pos).collect();
                join(
                    rule_idx,
                    rule,
                    branch,
                    delta_pos,
                    delta_level,
                    &mut remaining,
                    &mut bindings,
                    &mut premises,
                    clock,
                    &mut out,
                )?;
            }
        }
    }
    Ok(out)
}

fn match_term_list(pattern: &PatternAtom, ground: &Atom, bindings: &mut [Option<Term>], trail: &mut Vec<u16>) -> bool {
    pattern.pred == ground.pred
        && pattern.args.len() == ground.args.len()
        && pattern
            .args
            .iter()
            .zip(&ground.args)
            .all(|(p, g)| match_term(p, g, bindings, trail))
}

#[allow(clippy::too_many_arguments)]
fn join(
    rule_idx: usize,
    rule: &Rule,
    branch: &Branch,
    delta_pos: usize,
    delta_level: u32,
    remaining: &mut Vec<usize>,
    bindings: &mut Vec<Option<Term>>,
    premises: &mut Vec<AtomId>,
    clock: &mut Clock,
    out: &mut Vec<Firing>,
) -> Result<(), Interrupt> {
    if remaining.is_empty() {
        out.push(Firing {
            rule: rule_idx,
            bindings: bindings.clone(),
            premises: premises.clone(),
        });
        return Ok(());
    }
    // smallest candidate list first
    let (slot, pos) = remaining
        .iter()
        .enumerate()
        .min_by_key(|(_, &p)| branch.candidates(&rule.body[p], bindings).len())
        .map(|(slot, &p)| (slot, p))
        .expect("non-empty");
    remaining.swap_remove(slot);

    // positions before the delta literal only see strictly older atoms
    let max_level = if pos < delta_pos {
        delta_level.checked_sub(1)
    } else {
        Some(delta_level)
    };
    if let Some(max_level) = max_level {
        let pattern = &rule.body[pos];
        let mut trail = Vec::new();
        for &id in branch.candidates(pattern, bindings) {
            clock.tick()?;
            let record = &branch.atoms[id as usize];
            if record.level > max_level {
                continue;
            }
            if match_term_list(pattern, &record.atom, bindings, &mut trail) {
                premises[pos] = id;
                join(
                    rule_idx,
                    rule,
                    branch,
                    delta_pos,
                    delta_level,
                    remaining,
                    bindings,
                    premises,
                    clock,
                    out,
                )?;
            }
            for v in trail.drain(..) {
                bindings[v as usize] = None;
            }
        }
    }
    remaining.push(pos);
    let last = remaining.len() - 1;
    remaining.swap(slot.min(last), last);
    Ok(())
}

enum BranchEnd {
    Saturated,
    LevelLimit,
    Closed,
    Split(Vec<Branch>),
}

struct Saturator<'a> {
    rules: &'a [Rule],
    limits: &'a Limits,
    clock: Clock,
    branches_created: usize,
    branch_limit_hit: bool,
    split_count: usize,
    firings: usize,
}

impl Saturator<'_> {
    fn root(&self) -> Branch {
        let mut branch = Branch::default();
        for rule in self.rules.iter().filter(|r| r.body.is_empty()) {
            let empty: Vec<Option<Term>> = vec![None; rule.var_count];
            match rule.head.len() {
                0 => branch.closed = true,
                1 => {
                    branch.add(
                        instantiate_atom(&rule.head[0], &empty),
                        0,
                        Vec::new(),
                        rule.from_passage,
                    );
                }
                _ => branch.pending.push(Pending {
                    atoms: rule.head.iter().map(|h| instantiate_atom(h, &empty)).collect(),
                    level: 0,
                    premises: Vec::new(),
                    passage: rule.from_passage,
                }),
            }
        }
        branch.round = 1;
        branch
    }

    /// Runs a branch until it saturates, closes, hits the level limit or
    /// needs to split.
    fn run(&mut self, branch: &mut Branch) -> Result<BranchEnd, Interrupt> {
        loop {
            if branch.closed {
                return Ok(BranchEnd::Closed);
            }
            branch
                .pending
                .retain(|p| !p.atoms.iter().any(|a| branch.lookup.contains_key(a)));
            if !branch.pending.is_empty() {
                return Ok(self.split(branch));
            }
            self.clock.check()?;

            let round = branch.round;
            let firings = round_firings(self.rules, branch, round, &mut self.clock)?;
            let beyond_limit = round as usize > self.limits.max_level;
            let mut progressed = false;
            for firing in firings {
                let rule = &self.rules[firing.rule];
                #[cfg(debug_assertions)]
                assert!(
                    branch.fired.insert((firing.rule, firing.premises.clone())),
                    "clause fired twice with the same grounding"
                );
                let heads: Vec<Atom> = rule
                    .head
                    .iter()
                    .map(|h| instantiate_atom(h, &firing.bindings))
                    .collect();
                if heads.iter().any(|h| branch.contains(h)) {
                    continue;
                }
                if beyond_limit {
                    // something is still derivable past the level bound
                    return Ok(BranchEnd::LevelLimit);
                }
                self.firings += 1;
                let passage = rule.from_passage || firing.premises.iter().any(|p| branch.atoms[*p as usize].passage);
                match heads.len() {
                    0 => {
                        branch.closed = true;
                        return Ok(BranchEnd::Closed);
                    }
                    1 => {
                        let head = heads.into_iter().next().unwrap();
                        progressed |= branch.add(head, round, firing.premises, passage);
                    }
                    _ => {
                        branch.pending.push(Pending {
                            atoms: heads,
                            level: round,
                            premises: firing.premises,
                            passage,
                        });
                        progressed = true;
                    }
                }
            }
            if !progressed {
                return Ok(BranchEnd::Saturated);
            }
            branch.round += 1;
        }
    }

    fn split(&mut self, branch: &mut Branch) -> BranchEnd {
        let pending = branch.pending.remove(0);
        let allowed = self.limits.max_branches.saturating_sub(self.branches_created);
        // one child reuses the parent's slot
        let take = pending.atoms.len().min(allowed + 1);
        if take < pending.atoms.len() {
            self.branch_limit_hit = true;
        }
        self.split_count += 1;
        self.branches_created += take.saturating_sub(1);
        let children = pending
            .atoms
            .iter()
            .take(take)
            .map(|atom| {
                let mut child = branch.clone();
                child.add(atom.clone(), pending.level, pending.premises.clone(), pending.passage);
                child
            })
            .collect();
        BranchEnd::Split(children)
    }
}

/// Runs the hypertableau prover on range-restricted clauses.
pub fn saturate(clauses: &[Clause], limits: &Limits) -> ProofResult {
    saturate_with_mode(clauses, limits, AnswerMode::Brave)
}

pub fn saturate_with_mode(clauses: &[Clause], limits: &Limits, mode: AnswerMode) -> ProofResult {
    let start = Instant::now();
    let rules: Vec<Rule> = clauses.iter().map(Rule::new).collect();
    let answer_vars: Vec<Symbol> = clauses
        .iter()
        .flat_map(|c| c.head.iter())
        .find(|a| a.pred == answer_symbol())
        .map(|a| {
            a.args
                .iter()
                .filter_map(|t| match t {
                    Term::Var(v) => Some(*v),
                    _ => None,
                })
                .collect()
        })
        .unwrap_or_default();

    let mut sat = Saturator {
        rules: &rules,
        limits,
        clock: Clock {
            start,
            budget: limits.time_budget,
            ticks: 0,
        },
        branches_created: 1,
        branch_limit_hit: false,
        split_count: 0,
        firings: 0,
    };

    let mut stack = vec![sat.root()];
    let mut timed_out = false;
    let mut level_limited = false;
    let mut open_branches = 0usize;
    let mut per_branch: Vec<Vec<(Substitution, usize, f64)>> = Vec::new();
    let mut derived: HashSet<Atom> = HashSet::new();
    let mut passage_derived = 0usize;

    let finish_open = |branch: &Branch, per_branch: &mut Vec<Vec<(Substitution, usize, f64)>>| {
        let mut answers = Vec::new();
        for id in branch.answer_atoms() {
            let rec = &branch.atoms[id as usize];
            let bindings = Substitution::from_pairs(answer_vars.iter().copied().zip(rec.atom.args.iter().cloned()))
                .expect("ground answer terms");
            answers.push((bindings, rec.level as usize, branch.passage_support(id)));
        }
        per_branch.push(answers);
    };

    while let Some(mut branch) = stack.pop() {
        let end = sat.run(&mut branch);
        for rec in branch.atoms.iter().filter(|r| r.level > 0) {
            if derived.insert(rec.atom.clone()) && rec.passage {
                passage_derived += 1;
            }
        }
        match end {
            Err(Interrupt::Timeout) => {
                timed_out = true;
                if !branch.closed {
                    open_branches += 1;
                    finish_open(&branch, &mut per_branch);
                }
                break;
            }
            Ok(BranchEnd::Closed) => {}
            Ok(BranchEnd::Saturated) => {
                open_branches += 1;
                finish_open(&branch, &mut per_branch);
            }
            Ok(BranchEnd::LevelLimit) => {
                level_limited = true;
                open_branches += 1;
                finish_open(&branch, &mut per_branch);
            }
            Ok(BranchEnd::Split(children)) => {
                // leftmost child on top of the stack
                stack.extend(children.into_iter().rev());
            }
        }
    }

    let answers = merge_answers(per_branch, mode);
    let status = if !answers.is_empty() {
        ProofStatus::AnswersFound
    } else if timed_out || level_limited || sat.branch_limit_hit {
        ProofStatus::BudgetExhausted
    } else if open_branches == 0 {
        ProofStatus::KbInconsistent
    } else {
        ProofStatus::SaturatedNoAnswer
    };

    ProofResult {
        status,
        answers,
        stats: ProofStats {
            derived_atom_count: derived.len(),
            passage_derived_count: passage_derived,
            split_count: sat.split_count,
            branches: sat.branches_created,
            open_branches,
            firings: sat.firings,
            elapsed: start.elapsed(),
        },
    }
}

fn merge_answers(per_branch: Vec<Vec<(Substitution, usize, f64)>>, mode: AnswerMode) -> Vec<Answer> {
    let mut merged: Vec<Answer> = Vec::new();
    let mut index: HashMap<Substitution, usize> = HashMap::new();
    let branch_count = per_branch.len();
    let mut seen_in: HashMap<Substitution, usize> = HashMap::new();
    for answers in per_branch {
        let mut this_branch = HashSet::new();
        for (bindings, level, support) in answers {
            if this_branch.insert(bindings.clone()) {
                *seen_in.entry(bindings.clone()).or_default() += 1;
            }
            match index.get(&bindings) {
                Some(&i) => {
                    if level < merged[i].proof_level {
                        merged[i].proof_level = level;
                        merged[i].passage_support = support;
                    }
                }
                None => {
                    index.insert(bindings.clone(), merged.len());
                    merged.push(Answer {
                        bindings,
                        proof_level: level,
                        passage_support: support,
                    });
                }
            }
        }
    }
    if mode == AnswerMode::Cautious {
        merged.retain(|a| seen_in.get(&a.bindings) == Some(&branch_count));
    }
    merged.sort_by(|a, b| {
        a.proof_level
            .cmp(&b.proof_level)
            .then_with(|| a.bindings.cmp(&b.bindings))
    });
    merged
}
