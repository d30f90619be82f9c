//! Test-only oracles and generators.
//!
//! The oracles work by brute-force grounding over an explicit constant
//! universe and share nothing with the prover's join or level machinery.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use logquest::logic::{Atom, Clause, Origin, Query, Substitution, Term};
use logquest::parser::{parse_kb, parse_patterns, parse_query};
use logquest::pipeline::{AnswerRecord, Engine, PipelineConfig};
use logquest::prover::{prove, Limits, ProofStatus};
use logquest::ranker::{LinearModel, ModelKind};
use logquest::retrieval::{Passage, SynonymLexicon};
use logquest::Symbol;
use rand::rngs::StdRng;
use rand::Rng;

pub type Model = HashSet<Atom>;

/// Constants occurring in clauses and extra atoms.
pub fn universe<'a>(clauses: &[Clause], extra: impl IntoIterator<Item = &'a Atom>) -> Vec<Symbol> {
    let mut out = Vec::new();
    for c in clauses {
        c.atoms().for_each(|a| a.collect_constants(&mut out));
    }
    extra.into_iter().for_each(|a| a.collect_constants(&mut out));
    out
}

fn clause_vars(c: &Clause) -> Vec<Symbol> {
    let mut vars = Vec::new();
    c.atoms().for_each(|a| a.collect_vars(&mut vars));
    vars
}

/// Every assignment of `vars` over `universe`.
pub fn assignments(vars: &[Symbol], universe: &[Symbol]) -> Vec<Substitution> {
    let mut out = vec![Substitution::new()];
    for v in vars {
        let mut next = Vec::new();
        for s in &out {
            for k in universe {
                let mut s2 = s.clone();
                s2.bind(*v, Term::Const(*k)).unwrap();
                next.push(s2);
            }
        }
        out = next;
    }
    out
}

/// All ground instances of the clauses over `universe`.
pub fn ground_all(clauses: &[Clause], universe: &[Symbol]) -> Vec<(Vec<Atom>, Vec<Atom>)> {
    let mut out = Vec::new();
    for c in clauses {
        for s in assignments(&clause_vars(c), universe) {
            let head = c.head.iter().map(|a| s.apply(a)).collect();
            let body = c.body.iter().map(|a| s.apply(a)).collect();
            out.push((head, body));
        }
    }
    out
}

/// Least model of a definite, function-free clause set by naive iteration
/// over its full grounding.
pub fn least_model(clauses: &[Clause], universe: &[Symbol]) -> Model {
    let ground = ground_all(clauses, universe);
    let mut model = Model::new();
    loop {
        let mut changed = false;
        for (head, body) in &ground {
            assert!(head.len() == 1, "least_model needs definite clauses");
            if body.iter().all(|b| model.contains(b)) && model.insert(head[0].clone()) {
                changed = true;
            }
        }
        if !changed {
            return model;
        }
    }
}

/// Models of a positive disjunctive clause set, enumerated by branching on
/// violated ground disjunctions. Every returned set is a model; every
/// minimal model is among them.
pub fn enumerate_models(clauses: &[Clause], universe: &[Symbol]) -> Vec<Model> {
    let ground = ground_all(clauses, universe);
    let mut models = Vec::new();
    let mut stack = vec![Model::new()];
    while let Some(mut m) = stack.pop() {
        let mut inconsistent = false;
        let mut split: Option<Vec<Atom>>;
        loop {
            let mut changed = false;
            split = None;
            for (head, body) in &ground {
                if !body.iter().all(|b| m.contains(b)) || head.iter().any(|h| m.contains(h)) {
                    continue;
                }
                match head.len() {
                    0 => {
                        inconsistent = true;
                        break;
                    }
                    1 => {
                        m.insert(head[0].clone());
                        changed = true;
                    }
                    _ => {
                        if split.is_none() {
                            split = Some(head.clone());
                        }
                    }
                }
            }
            if inconsistent || !changed {
                break;
            }
        }
        if inconsistent {
            continue;
        }
        match split {
            None => models.push(m),
            Some(head) => {
                for h in head {
                    let mut child = m.clone();
                    child.insert(h);
                    stack.push(child);
                }
            }
        }
    }
    models
}

/// Answers to `query` in a model: assignments of the answer variables for
/// which some assignment of the remaining variables satisfies every subgoal.
pub fn answers_in(model: &Model, query: &Query, universe: &[Symbol]) -> BTreeSet<Substitution> {
    let vars = query.vars();
    assignments(&vars, universe)
        .into_iter()
        .filter(|s| query.subgoals.iter().all(|g| model.contains(&s.apply(g))))
        .map(|s| s.restrict(&query.answer_vars))
        .collect()
}

/// Every model reachable by interleaving two moves in any order: add all
/// one-step consequences of the definite ground clauses at once, or satisfy
/// one currently violated disjunction by choosing one of its heads. Each
/// open hypertableau branch ends in one of these; every minimal model is
/// among them.
pub fn reachable_models(clauses: &[Clause], universe: &[Symbol]) -> Vec<Model> {
    use std::collections::HashMap;

    let ground = ground_all(clauses, universe);
    let mut ids: HashMap<Atom, usize> = HashMap::new();
    let mut table: Vec<Atom> = Vec::new();
    let mut id = |a: &Atom| {
        *ids.entry(a.clone()).or_insert_with(|| {
            table.push(a.clone());
            table.len() - 1
        })
    };
    let ground: Vec<(Vec<usize>, Vec<usize>)> = ground
        .iter()
        .map(|(h, b)| (h.iter().map(&mut id).collect(), b.iter().map(&mut id).collect()))
        .collect();
    let n = table.len();

    let mut seen: HashSet<Vec<bool>> = HashSet::new();
    let mut finals: HashSet<Vec<bool>> = HashSet::new();
    let mut stack = vec![vec![false; n]];
    while let Some(state) = stack.pop() {
        if !seen.insert(state.clone()) {
            continue;
        }
        let fired = |(_, body): &&(Vec<usize>, Vec<usize>)| body.iter().all(|b| state[*b]);
        let violated: Vec<&Vec<usize>> = ground
            .iter()
            .filter(fired)
            .filter(|(head, _)| !head.iter().any(|h| state[*h]))
            .map(|(head, _)| head)
            .collect();
        if violated.iter().any(|h| h.is_empty()) {
            continue; // closed
        }
        if violated.is_empty() {
            finals.insert(state);
            continue;
        }
        let horn: Vec<usize> = violated.iter().filter(|h| h.len() == 1).map(|h| h[0]).collect();
        if !horn.is_empty() {
            let mut next = state.clone();
            horn.iter().for_each(|h| next[*h] = true);
            stack.push(next);
        }
        for head in violated.iter().filter(|h| h.len() > 1) {
            for h in head.iter() {
                let mut next = state.clone();
                next[*h] = true;
                stack.push(next);
            }
        }
    }
    finals
        .into_iter()
        .map(|bits| (0..n).filter(|i| bits[*i]).map(|i| table[i].clone()).collect())
        .collect()
}

/// Models of `models` that have no proper sub-model in the list.
pub fn minimal_models(models: &[Model]) -> Vec<Model> {
    models
        .iter()
        .filter(|m| !models.iter().any(|o| o.len() < m.len() && o.is_subset(m)))
        .cloned()
        .collect()
}

pub fn strip_domain(model: &Model) -> Model {
    model.iter().filter(|a| a.pred.as_str() != "dom").cloned().collect()
}

#[derive(Clone, Copy, Debug)]
pub struct KbShape {
    pub preds: usize,
    pub consts: usize,
    pub clauses: usize,
    pub max_body: usize,
    /// Probability that a rule gets a two-atom head.
    pub disjunction_rate: f64,
    /// Allow head variables that do not occur in the body.
    pub unrestricted_heads: bool,
}

impl Default for KbShape {
    fn default() -> Self {
        KbShape {
            preds: 6,
            consts: 8,
            clauses: 12,
            max_body: 3,
            disjunction_rate: 0.0,
            unrestricted_heads: false,
        }
    }
}

pub struct RandomKb {
    pub clauses: Vec<Clause>,
    pub preds: Vec<(String, usize)>,
    pub consts: Vec<String>,
}

const VARS: [&str; 4] = ["X", "Y", "Z", "W"];

fn random_arg(rng: &mut StdRng, consts: &[String], vars: &[&str], const_rate: f64) -> Term {
    if vars.is_empty() || rng.gen_bool(const_rate) {
        Term::constant(&consts[rng.gen_range(0..consts.len())])
    } else {
        Term::var(vars[rng.gen_range(0..vars.len())])
    }
}

pub fn random_atom(
    rng: &mut StdRng,
    preds: &[(String, usize)],
    consts: &[String],
    vars: &[&str],
    const_rate: f64,
) -> Atom {
    let (name, arity) = &preds[rng.gen_range(0..preds.len())];
    Atom::new(
        name,
        (0..*arity).map(|_| random_arg(rng, consts, vars, const_rate)).collect(),
    )
}

/// A random function-free KB of at most `shape` size. Facts are ground;
/// predicate names are prefixed with `prefix` so that distinct generators do
/// not collide.
pub fn random_kb(rng: &mut StdRng, shape: KbShape) -> RandomKb {
    let n_preds = rng.gen_range(1..=shape.preds);
    let n_consts = rng.gen_range(1..=shape.consts);
    let preds: Vec<(String, usize)> = (0..n_preds).map(|i| (format!("p{i}"), rng.gen_range(1..=2))).collect();
    let consts: Vec<String> = (0..n_consts).map(|i| format!("c{i}")).collect();
    let n_clauses = rng.gen_range(1..=shape.clauses);
    let mut clauses = Vec::new();
    for _ in 0..n_clauses {
        if rng.gen_bool(0.45) {
            let heads = if rng.gen_bool(shape.disjunction_rate) { 2 } else { 1 };
            let head = (0..heads)
                .map(|_| random_atom(rng, &preds, &consts, &[], 1.0))
                .collect();
            clauses.push(Clause::new(head, vec![]));
            continue;
        }
        let body_len = rng.gen_range(1..=shape.max_body);
        let body: Vec<Atom> = (0..body_len)
            .map(|_| random_atom(rng, &preds, &consts, &VARS[..3], 0.2))
            .collect();
        let mut body_vars = Vec::new();
        body.iter().for_each(|a| a.collect_vars(&mut body_vars));
        let names: Vec<&str> = if shape.unrestricted_heads {
            VARS.to_vec()
        } else {
            body_vars.iter().map(|s| s.as_str()).collect()
        };
        let head_len = if rng.gen_bool(shape.disjunction_rate) { 2 } else { 1 };
        let head = (0..head_len)
            .map(|_| random_atom(rng, &preds, &consts, &names, 0.15))
            .collect();
        clauses.push(Clause::new(head, body));
    }
    RandomKb { clauses, preds, consts }
}

/// A query of 1..=max_subgoals atoms over the KB's predicates.
pub fn random_query(rng: &mut StdRng, kb: &RandomKb, max_subgoals: usize) -> Query {
    let n = rng.gen_range(1..=max_subgoals);
    let subgoals = (0..n)
        .map(|_| random_atom(rng, &kb.preds, &kb.consts, &VARS[..2], 0.25))
        .collect();
    Query::new(subgoals)
}

pub fn background(clauses: Vec<Clause>) -> Vec<Clause> {
    clauses.into_iter().map(|c| c.with_origin(Origin::Background)).collect()
}

pub fn bundled_assets() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../assets")
}

pub fn bundled_engine(adjust: impl FnOnce(&mut PipelineConfig)) -> Engine {
    let mut config = PipelineConfig::with_asset_root(bundled_assets());
    adjust(&mut config);
    Engine::load(config).expect("bundled assets load")
}

/// An engine whose every candidate passage makes saturation blow up: a
/// recursive closure over a cycle plus a cubic cross product, and a query
/// subgoal that never holds, so no proof can stop early.
pub fn adversarial_engine(config: PipelineConfig, passages: usize) -> Engine {
    let background = parse_kb(
        "reach(X, Y) :- edge(X, Y).\n\
         reach(X, Z) :- edge(X, Y), reach(Y, Z).\n\
         cube(X, Y, Z) :- node(X), node(Y), node(Z).\n\
         deep(X) :- reach(X, Y), cube(Y, X, Y).\n",
        Origin::Background,
    )
    .unwrap();
    let patterns = parse_patterns("what does <e> reach\t?- reach(<e>, X), deep(X), blocked(X).\n").unwrap();
    let nodes = 70;
    let mut facts = String::from("blocked(nowhere).\n");
    for i in 0..nodes {
        facts.push_str(&format!("node(n{i}).\nedge(n{i}, n{}).\n", (i + 1) % nodes));
    }
    let facts = parse_kb(&facts, Origin::Background).unwrap();
    let passages = (0..passages)
        .map(|i| {
            let facts = facts
                .iter()
                .map(|c| c.clone().with_origin(Origin::passage(&format!("a{i}"))))
                .collect();
            Passage::new(format!("a{i}"), format!("What n0 does reach, variant {i}."), facts)
        })
        .collect();
    Engine::from_parts(
        config,
        passages,
        background,
        patterns,
        SynonymLexicon::empty(),
        LinearModel::with_dimension(ModelKind::Passage, vec![0.0, 0.0, 0.0, 1.0, 0.0], 0.0),
        LinearModel::zeros(ModelKind::Answer),
    )
    .unwrap()
}

pub fn small_engine(config: PipelineConfig, passages: &[(String, String, String)], patterns: &str) -> Engine {
    let passages = passages
        .iter()
        .map(|(id, text, facts)| Passage::new(id.clone(), text.clone(), parse_kb(facts, Origin::passage(id)).unwrap()))
        .collect();
    Engine::from_parts(
        config,
        passages,
        Vec::new(),
        parse_patterns(patterns).unwrap(),
        SynonymLexicon::empty(),
        LinearModel::with_dimension(ModelKind::Passage, vec![0.0, 0.0, 0.0, 1.0, 0.0], 0.0),
        LinearModel::with_dimension(ModelKind::Answer, vec![-1.0, 0.0, 1.0, 0.0, 0.0], 0.0),
    )
    .unwrap()
}

pub const COLOUR_PATTERN: &str = "what colour is the <e>\t?- colour(<e>, X).\nwhat colour is <e>\t?- colour(<e>, X).\n";

pub fn colour_passages(n: usize) -> Vec<(String, String, String)> {
    (0..n)
        .map(|i| {
            (
                format!("c{i}"),
                format!("The kite colour is colour{i}."),
                format!("colour(kite, colour{i})."),
            )
        })
        .collect()
}

/// Independent entailment check: the parsed query minus the dropped
/// subgoals, instantiated with the record's bindings, proved from scratch.
pub fn entailed(engine: &Engine, question: &str, r: &AnswerRecord) -> bool {
    let parsed = engine.parse(question).unwrap();
    let mut text: Vec<String> = parsed
        .query
        .subgoals
        .iter()
        .map(|g| g.to_string())
        .filter(|g| !r.dropped_subgoals.contains(g))
        .collect();
    for (var, value) in &r.bindings {
        for goal in &mut text {
            *goal = replace_var(goal, var, value);
        }
    }
    let ground: Query = parse_query(&format!("?- {}.", text.join(", "))).unwrap();
    assert!(ground.answer_vars.is_empty(), "{ground} not ground");
    let passage = engine.passage(&r.passage_id).unwrap();
    let result = prove(
        engine.background(),
        &passage.facts,
        &ground,
        &Limits::unbounded_time(64, 1024),
    )
    .unwrap();
    result.status == ProofStatus::AnswersFound
}

fn replace_var(goal: &str, var: &str, value: &str) -> String {
    let mut out = String::new();
    let mut word = String::new();
    let flush = |word: &mut String, out: &mut String| {
        out.push_str(if word == var { value } else { word });
        word.clear();
    };
    for ch in goal.chars() {
        if ch.is_alphanumeric() || ch == '_' {
            word.push(ch);
        } else {
            flush(&mut word, &mut out);
            out.push(ch);
        }
    }
    flush(&mut word, &mut out);
    out
}
