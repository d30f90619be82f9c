//! Gold question sets and the accuracy/latency benchmark.

use std::path::Path;
use std::time::Duration;

use super::engine::{AskOptions, Engine};

/// A question with its accepted answers.
#[derive(Clone, Debug, PartialEq)]
pub struct GoldItem {
    pub question: String,
    pub answers: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum GoldError {
    #[error("cannot read gold set: {0}")]
    Io(#[from] std::io::Error),
    #[error("gold line {0}: expected `question<TAB>answer[|answer...]`")]
    Format(usize),
}

/// `question<TAB>answer|alternative` per line; `#` comments.
pub fn parse_gold(text: &str) -> Result<Vec<GoldItem>, GoldError> {
    let mut items = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let (q, a) = line.split_once('\t').ok_or(GoldError::Format(idx + 1))?;
        let answers: Vec<String> = a
            .split('|')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
        if q.trim().is_empty() || answers.is_empty() {
            return Err(GoldError::Format(idx + 1));
        }
        items.push(GoldItem {
            question: q.trim().to_string(),
            answers,
        });
    }
    Ok(items)
}

pub fn load_gold(path: impl AsRef<Path>) -> Result<Vec<GoldItem>, GoldError> {
    parse_gold(&std::fs::read_to_string(path)?)
}

/// Comparison form of an answer: lowercase words, `_`/`-` as spaces.
pub fn normalize_answer(text: &str) -> String {
    text.to_lowercase()
        .split(|c: char| c.is_whitespace() || c == '_' || c == '-')
        .filter(|w| !w.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn matches_gold(answer_text: &str, gold: &GoldItem) -> bool {
    let a = normalize_answer(answer_text);
    gold.answers.iter().any(|g| normalize_answer(g) == a)
}

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub question: String,
    pub expected: Vec<String>,
    pub answers: Vec<String>,
    pub correct: bool,
    pub latency: Duration,
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Depth of the accuracy measure (answers returned per question).
    pub depth: usize,
}

/// Nearest-rank percentile of sorted durations.
pub fn percentile(sorted: &[Duration], p: f64) -> Duration {
    if sorted.is_empty() {
        return Duration::ZERO;
    }
    let rank = ((p / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

impl BenchReport {
    pub fn accuracy(&self) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        self.rows.iter().filter(|r| r.correct).count() as f64 / self.rows.len() as f64
    }

    fn sorted_latencies(&self) -> Vec<Duration> {
        let mut l: Vec<Duration> = self.rows.iter().map(|r| r.latency).collect();
        l.sort();
        l
    }

    pub fn latency_percentile(&self, p: f64) -> Duration {
        percentile(&self.sorted_latencies(), p)
    }

    pub fn summary(&self) -> String {
        format!(
            "questions: {}\naccuracy@{}: {:.3}\nlatency p50: {:?}\nlatency p90: {:?}\nlatency p99: {:?}\nlatency max: {:?}",
            self.rows.len(),
            self.depth,
            self.accuracy(),
            self.latency_percentile(50.0),
            self.latency_percentile(90.0),
            self.latency_percentile(99.0),
            self.latency_percentile(100.0),
        )
    }
}

pub fn run_bench(engine: &Engine, gold: &[GoldItem]) -> BenchReport {
    let options = AskOptions::default();
    let rows = gold
        .iter()
        .map(|item| {
            let start = std::time::Instant::now();
            let outcome = engine.ask(&item.question, &options);
            let latency = start.elapsed();
            let (answers, error) = match outcome {
                Ok(o) => (o.records.into_iter().map(|r| r.answer_text).collect::<Vec<_>>(), None),
                Err(e) => (Vec::new(), Some(e.to_string())),
            };
            BenchRow {
                question: item.question.clone(),
                expected: item.answers.clone(),
                correct: answers.iter().any(|a| matches_gold(a, item)),
                answers,
                latency,
                error,
            }
        })
        .collect();
    BenchReport {
        rows,
        depth: engine.config().answers_returned,
    }
}
