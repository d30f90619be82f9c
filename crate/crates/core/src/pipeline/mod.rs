//! Question answering end to end: parse, retrieve, prove, rank, present.

mod bench;
mod config;
mod engine;
mod record;
mod training;

pub use bench::{
    load_gold, matches_gold, normalize_answer, parse_gold, percentile, run_bench, BenchReport, BenchRow, GoldError,
    GoldItem,
};
pub use config::{AssetPaths, ConfigError, PipelineConfig, CONFIG_ENV, SCHEDULING_SLACK};
pub use engine::{AskOptions, AskOutcome, AskStats, Diagnostic, Engine, LoadError, Provenance};
pub use record::{constant_words, highlight_spans, render_answer, render_term, AnswerRecord};
pub use training::{answer_training_set, passage_training_set};
