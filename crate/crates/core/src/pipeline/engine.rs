use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use super::config::{ConfigError, PipelineConfig};
use super::record::{highlight_spans, render_answer, AnswerRecord};
use crate::logic::{Clause, Origin, Query, Term};
use crate::parser::{
    load_corpus, parse_kb, parse_patterns, parse_question, CorpusError, ParsedQuestion, PatternError, QuestionError,
    QuestionPattern, SyntaxError,
};
use crate::prover::{prove, validate_input, CompileError, Limits, ProofStatus};
use crate::ranker::{rank_answers, AnswerCandidate, AnswerFeatures, LinearModel, ModelError, ModelKind};
use crate::relax::{prove_with_relaxation, RelaxedProof};
use crate::retrieval::{rank_passages, IndexError, InvertedIndex, Passage, RankedPassage, SynonymLexicon};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Corpus { path: PathBuf, source: CorpusError },
    #[error("{path}: {source}")]
    Kb { path: PathBuf, source: SyntaxError },
    #[error("{path}: {source}")]
    Patterns { path: PathBuf, source: PatternError },
    #[error("{path}: {source}")]
    Model { path: PathBuf, source: ModelError },
    #[error("{path}: expected a {expected} model, found {found}")]
    ModelKind {
        path: PathBuf,
        expected: ModelKind,
        found: ModelKind,
    },
    #[error("corpus: {0}")]
    Index(#[from] IndexError),
    #[error("knowledge base: {0}")]
    Compile(#[from] CompileError),
}

/// Why an answer list is empty or how it was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagnostic {
    NoMatchingPassages,
    NoAnswerFound,
    AnswersOnlyViaRelaxation,
}

impl Diagnostic {
    pub fn message(self) -> &'static str {
        match self {
            Diagnostic::NoMatchingPassages => "no matching passages",
            Diagnostic::NoAnswerFound => "no answer found",
            Diagnostic::AnswersOnlyViaRelaxation => "answers found only via relaxation",
        }
    }
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.message())
    }
}

#[derive(Clone, Debug, Default)]
pub struct AskStats {
    pub candidates: usize,
    /// Candidates whose proof was started before the question budget ran out.
    pub launched: usize,
    pub budget_exhausted: usize,
    pub rejected_by_recheck: usize,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct AskOutcome {
    pub query: Query,
    pub records: Vec<AnswerRecord>,
    pub diagnostic: Option<Diagnostic>,
    pub stats: AskStats,
}

/// Per-request overrides.
#[derive(Clone, Copy, Debug, Default)]
pub struct AskOptions {
    pub answers: Option<usize>,
    pub max_relax: Option<usize>,
}

/// A proved answer before ranking.
#[derive(Clone, Debug)]
pub struct Provenance {
    pub candidate_rank: usize,
    pub relaxed_query: Query,
    pub dropped: Vec<String>,
}

/// Loaded, immutable engine state.
pub struct Engine {
    config: PipelineConfig,
    passages: Vec<Passage>,
    by_id: HashMap<String, usize>,
    index: InvertedIndex,
    background: Vec<Clause>,
    patterns: Vec<QuestionPattern>,
    passage_model: LinearModel,
    answer_model: LinearModel,
}

fn read(path: &Path) -> Result<String, LoadError> {
    std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_model(path: &Path, kind: ModelKind) -> Result<LinearModel, LoadError> {
    let model = LinearModel::load(path).map_err(|source| LoadError::Model {
        path: path.to_path_buf(),
        source,
    })?;
    if model.kind() != kind {
        return Err(LoadError::ModelKind {
            path: path.to_path_buf(),
            expected: kind,
            found: model.kind(),
        });
    }
    Ok(model)
}

impl Engine {
    pub fn load(config: PipelineConfig) -> Result<Engine, LoadError> {
        config.validate()?;
        let paths = config.paths.clone();
        let passages = load_corpus(&paths.corpus).map_err(|source| LoadError::Corpus {
            path: paths.corpus.clone(),
            source,
        })?;
        let background =
            parse_kb(&read(&paths.background_kb)?, Origin::Background).map_err(|source| LoadError::Kb {
                path: paths.background_kb.clone(),
                source,
            })?;
        let patterns = parse_patterns(&read(&paths.patterns)?).map_err(|source| LoadError::Patterns {
            path: paths.patterns.clone(),
            source,
        })?;
        let lexicon = match &paths.synonyms {
            Some(p) => SynonymLexicon::parse(&read(p)?),
            None => SynonymLexicon::empty(),
        };
        let passage_model = load_model(&paths.passage_model, ModelKind::Passage)?;
        let answer_model = load_model(&paths.answer_model, ModelKind::Answer)?;
        Engine::from_parts(
            config,
            passages,
            background,
            patterns,
            lexicon,
            passage_model,
            answer_model,
        )
    }

    pub fn from_parts(
        config: PipelineConfig,
        passages: Vec<Passage>,
        background: Vec<Clause>,
        patterns: Vec<QuestionPattern>,
        lexicon: SynonymLexicon,
        passage_model: LinearModel,
        answer_model: LinearModel,
    ) -> Result<Engine, LoadError> {
        config.validate()?;
        for (model, kind) in [(&passage_model, ModelKind::Passage), (&answer_model, ModelKind::Answer)] {
            if model.kind() != kind || model.weights().len() != kind.dimension() {
                return Err(LoadError::Model {
                    path: PathBuf::new(),
                    source: ModelError::DimensionMismatch {
                        expected: kind.dimension(),
                        found: model.weights().len(),
                    },
                });
            }
        }
        // arities must agree across the KB and every passage
        validate_input(background.iter().chain(passages.iter().flat_map(|p| &p.facts)), None)?;
        let index = InvertedIndex::build(&passages, lexicon)?;
        let by_id = passages.iter().enumerate().map(|(i, p)| (p.id.clone(), i)).collect();
        Ok(Engine {
            config,
            passages,
            by_id,
            index,
            background,
            patterns,
            passage_model,
            answer_model,
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn passages(&self) -> &[Passage] {
        &self.passages
    }

    pub fn passage(&self, id: &str) -> Option<&Passage> {
        self.by_id.get(id).map(|i| &self.passages[*i])
    }

    pub fn background(&self) -> &[Clause] {
        &self.background
    }

    pub fn patterns(&self) -> &[QuestionPattern] {
        &self.patterns
    }

    pub fn index(&self) -> &InvertedIndex {
        &self.index
    }

    pub fn limits(&self) -> Limits {
        Limits {
            max_level: self.config.max_level,
            time_budget: self.config.per_candidate_budget,
            max_branches: self.config.max_branches,
        }
    }

    pub fn parse(&self, question: &str) -> Result<ParsedQuestion, QuestionError> {
        parse_question(question, &self.patterns)
    }

    pub fn rank_passages(&self, question: &str) -> Vec<RankedPassage> {
        rank_passages(question, &self.index, &self.passage_model, self.config.top_k_passages)
            .expect("passage model dimension checked at load")
    }

    /// Proves the query against each candidate passage, at most
    /// `concurrency` at a time, launching none after `launch_deadline`.
    /// Results are indexed by candidate rank, so arrival order is irrelevant.
    fn prove_candidates(
        &self,
        query: &Query,
        candidates: &[RankedPassage],
        max_relax: usize,
        launch_deadline: Instant,
        launched: &AtomicUsize,
    ) -> Vec<Option<RelaxedProof>> {
        let limits = self.limits();
        let next = AtomicUsize::new(0);
        let results: Mutex<Vec<Option<RelaxedProof>>> = Mutex::new(vec![None; candidates.len()]);
        let workers = self.config.concurrency.min(candidates.len()).max(1);
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    if Instant::now() >= launch_deadline {
                        break;
                    }
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    let Some(candidate) = candidates.get(i) else { break };
                    launched.fetch_add(1, Ordering::SeqCst);
                    let passage = self.passage(&candidate.id).expect("ranked ids come from the corpus");
                    // a compile error here is a query that does not fit the
                    // KB signature; it proves nothing on any passage
                    if let Ok(proof) =
                        prove_with_relaxation(&self.background, &passage.facts, query, &limits, max_relax)
                    {
                        results.lock().unwrap()[i] = Some(proof);
                    }
                });
            }
        });
        results.into_inner().unwrap()
    }

    /// All proved answers of a parsed question, with their features, before
    /// answer ranking.
    pub fn collect_candidates(
        &self,
        parsed: &ParsedQuestion,
        question: &str,
        options: &AskOptions,
        stats: &mut AskStats,
        start: Instant,
    ) -> Vec<AnswerCandidate<Provenance>> {
        let ranked = self.rank_passages(question);
        stats.candidates = ranked.len();
        let max_relax = options.max_relax.unwrap_or(self.config.max_relax);
        let launched = AtomicUsize::new(0);
        let deadline = start + self.config.question_budget;
        let proofs = self.prove_candidates(&parsed.query, &ranked, max_relax, deadline, &launched);
        stats.launched = launched.into_inner();

        let mut out = Vec::new();
        for (rank, (candidate, proof)) in ranked.iter().zip(proofs).enumerate() {
            let Some(proof) = proof else { continue };
            if proof.result.status == ProofStatus::BudgetExhausted {
                stats.budget_exhausted += 1;
            }
            let dropped: Vec<String> = proof.relaxed.dropped.iter().map(|a| a.to_string()).collect();
            for answer in proof.result.answers {
                out.push(AnswerCandidate {
                    features: AnswerFeatures {
                        relax_count: proof.relaxed.relax_count,
                        proof_level: answer.proof_level,
                        retrieval_score: candidate.score,
                        passage_support_ratio: answer.passage_support,
                        answer_is_ground: AnswerFeatures::bindings_are_constants(&answer.bindings),
                    },
                    bindings: answer.bindings,
                    passage_id: candidate.id.clone(),
                    payload: Provenance {
                        candidate_rank: rank,
                        relaxed_query: proof.relaxed.query.clone(),
                        dropped: dropped.clone(),
                    },
                });
            }
        }
        out
    }

    /// Re-proves the relaxed query instantiated with the answer's bindings.
    pub fn recheck(&self, candidate: &AnswerCandidate<Provenance>, deadline: Instant) -> bool {
        let Some(passage) = self.passage(&candidate.passage_id) else {
            return false;
        };
        let remaining = deadline.saturating_duration_since(Instant::now());
        let limits = Limits {
            time_budget: remaining.min(self.config.per_candidate_budget),
            ..self.limits()
        };
        let ground = Query {
            subgoals: candidate
                .payload
                .relaxed_query
                .subgoals
                .iter()
                .map(|g| candidate.bindings.apply(g))
                .collect(),
            answer_vars: Vec::new(),
        };
        if !ground.subgoals.iter().all(|g| g.is_ground()) {
            return false;
        }
        prove(&self.background, &passage.facts, &ground, &limits)
            .map(|r| r.status == ProofStatus::AnswersFound)
            .unwrap_or(false)
    }

    pub fn ask(&self, question: &str, options: &AskOptions) -> Result<AskOutcome, QuestionError> {
        let start = Instant::now();
        let parsed = self.parse(question)?;
        let mut stats = AskStats::default();
        let candidates = self.collect_candidates(&parsed, question, options, &mut stats, start);

        let n = options.answers.unwrap_or(self.config.answers_returned);
        let deadline = start + self.config.latency_bound();
        let ranked =
            rank_answers(candidates, &self.answer_model, usize::MAX).expect("answer model dimension checked at load");
        let mut records = Vec::new();
        for r in ranked {
            if records.len() >= n {
                break;
            }
            if !self.recheck(&r.candidate, deadline) {
                stats.rejected_by_recheck += 1;
                continue;
            }
            records.push(self.record(&r.candidate, r.score, &parsed));
        }

        let diagnostic = if stats.candidates == 0 {
            Some(Diagnostic::NoMatchingPassages)
        } else if records.is_empty() {
            Some(Diagnostic::NoAnswerFound)
        } else if records.iter().all(|r| r.relax_count > 0) {
            Some(Diagnostic::AnswersOnlyViaRelaxation)
        } else {
            None
        };
        stats.elapsed = start.elapsed();
        Ok(AskOutcome {
            query: parsed.query,
            records,
            diagnostic,
            stats,
        })
    }

    fn record(&self, c: &AnswerCandidate<Provenance>, score: f64, parsed: &ParsedQuestion) -> AnswerRecord {
        let passage = self.passage(&c.passage_id).expect("candidate passage exists");
        let answer_constants: Vec<&str> = c
            .bindings
            .iter()
            .filter_map(|(_, t)| match t {
                Term::Const(s) => Some(s.as_str()),
                _ => None,
            })
            .collect();
        let highlighted = answer_constants
            .iter()
            .copied()
            .chain(parsed.entities.iter().map(String::as_str));
        AnswerRecord {
            answer_text: render_answer(&c.bindings, &passage.text),
            bindings: c.bindings.iter().map(|(v, t)| (v.to_string(), t.to_string())).collect(),
            confidence: score,
            passage_id: passage.id.clone(),
            passage_text: passage.text.clone(),
            highlight_spans: highlight_spans(&passage.text, highlighted),
            relax_count: c.features.relax_count,
            dropped_subgoals: c.payload.dropped.clone(),
        }
    }
}
