//! Engine configuration and its flat `key = value` file format.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::ranker::DEFAULT_ANSWERS;
use crate::relax::DEFAULT_MAX_RELAX;
use crate::retrieval::DEFAULT_TOP_K;

/// Environment variable naming a config file.
pub const CONFIG_ENV: &str = "LOGQUEST_CONFIG";

/// Allowance on top of the budget formula for thread scheduling and answer
/// assembly.
pub const SCHEDULING_SLACK: Duration = Duration::from_millis(250);

#[derive(Clone, Debug, PartialEq)]
pub struct AssetPaths {
    pub corpus: PathBuf,
    pub background_kb: PathBuf,
    pub patterns: PathBuf,
    /// Optional: without it no synonyms are merged.
    pub synonyms: Option<PathBuf>,
    pub passage_model: PathBuf,
    pub answer_model: PathBuf,
}

impl AssetPaths {
    /// The standard layout below an asset directory.
    pub fn under(root: impl AsRef<Path>) -> AssetPaths {
        let root = root.as_ref();
        AssetPaths {
            corpus: root.join("corpus/demo.jsonl"),
            background_kb: root.join("kb/background.lkb"),
            patterns: root.join("patterns/en.qpat"),
            synonyms: Some(root.join("lexicon/en.syn")),
            passage_model: root.join("models/passage.lrm"),
            answer_model: root.join("models/answer.lrm"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub top_k_passages: usize,
    pub per_candidate_budget: Duration,
    pub max_relax: usize,
    pub max_level: usize,
    pub max_branches: usize,
    pub answers_returned: usize,
    pub question_budget: Duration,
    /// Candidate proofs in flight at once.
    pub concurrency: usize,
    pub paths: AssetPaths,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            top_k_passages: DEFAULT_TOP_K,
            per_candidate_budget: Duration::from_millis(200),
            max_relax: DEFAULT_MAX_RELAX,
            max_level: 12,
            max_branches: 64,
            answers_returned: DEFAULT_ANSWERS,
            question_budget: Duration::from_secs(10),
            concurrency: 4,
            paths: AssetPaths::under("assets"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("config line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("config line {line}: bad value for {key}: {message}")]
    BadValue { line: usize, key: String, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl PipelineConfig {
    pub fn with_asset_root(root: impl AsRef<Path>) -> PipelineConfig {
        PipelineConfig {
            paths: AssetPaths::under(root),
            ..Default::default()
        }
    }

    /// Worst-case wall time of one `ask`, scheduling slack included.
    pub fn latency_bound(&self) -> Duration {
        self.question_budget + self.per_candidate_budget * (self.max_relax as u32 + 1) + SCHEDULING_SLACK
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("top_k_passages", self.top_k_passages),
            ("max_level", self.max_level),
            ("max_branches", self.max_branches),
            ("answers_returned", self.answers_returned),
            ("concurrency", self.concurrency),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(ConfigError::Invalid(format!("{name} must be positive")));
        }
        if self.per_candidate_budget.is_zero() || self.question_budget.is_zero() {
            return Err(ConfigError::Invalid("budgets must be positive".into()));
        }
        if self.answers_returned > self.top_k_passages {
            return Err(ConfigError::Invalid(format!(
                "answers_returned ({}) exceeds top_k_passages ({})",
                self.answers_returned, self.top_k_passages
            )));
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of `self`. Relative paths resolve
    /// against `base`.
    pub fn apply_text(mut self, text: &str, base: &Path) -> Result<PipelineConfig, ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or(ConfigError::Syntax { line })?;
            self.set(key.trim(), value.trim(), base).map_err(|e| match e {
                SetError::Unknown => ConfigError::UnknownKey {
                    line,
                    key: key.trim().to_string(),
                },
                SetError::Value(message) => ConfigError::BadValue {
                    line,
                    key: key.trim().to_string(),
                    message,
                },
            })?;
        }
        Ok(self)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<PipelineConfig, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        PipelineConfig::default().apply_text(&text, base)
    }

    /// Sets one option by its config-file key.
    pub fn set_option(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        self.set(key, value, Path::new("")).map_err(|e| match e {
            SetError::Unknown => ConfigError::UnknownKey {
                line: 0,
                key: key.to_string(),
            },
            SetError::Value(message) => ConfigError::BadValue {
                line: 0,
                key: key.to_string(),
                message,
            },
        })
    }

    fn set(&mut self, key: &str, value: &str, base: &Path) -> Result<(), SetError> {
        let count = || value.parse::<usize>().map_err(|e| SetError::Value(e.to_string()));
        let duration = || humantime::parse_duration(value).map_err(|e| SetError::Value(e.to_string()));
        let path = || {
            if value.is_empty() {
                return Err(SetError::Value("empty path".into()));
            }
            Ok(base.join(value))
        };
        match key {
            "top_k_passages" => self.top_k_passages = count()?,
            "per_candidate_budget" => self.per_candidate_budget = duration()?,
            "max_relax" => self.max_relax = count()?,
            "max_level" => self.max_level = count()?,
            "max_branches" => self.max_branches = count()?,
            "answers_returned" => self.answers_returned = count()?,
            "question_budget" => self.question_budget = duration()?,
            "concurrency" => self.concurrency = count()?,
            "corpus" => self.paths.corpus = path()?,
            "background_kb" => self.paths.background_kb = path()?,
            "patterns" => self.paths.patterns = path()?,
            "synonyms" => {
                self.paths.synonyms = match value {
                    "" | "none" => None,
                    _ => Some(path()?),
                }
            }
            "passage_model" => self.paths.passage_model = path()?,
            "answer_model" => self.paths.answer_model = path()?,
            _ => return Err(SetError::Unknown),
        }
        Ok(())
    }

    /// Renders the config in the file format; `load` reads it back.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let ms = |d: Duration| format!("{}ms", d.as_millis());
        let p = |p: &Path| p.display().to_string();
        let _ = writeln!(out, "top_k_passages = {}", self.top_k_passages);
        let _ = writeln!(out, "per_candidate_budget = {}", ms(self.per_candidate_budget));
        let _ = writeln!(out, "max_relax = {}", self.max_relax);
        let _ = writeln!(out, "max_level = {}", self.max_level);
        let _ = writeln!(out, "max_branches = {}", self.max_branches);
        let _ = writeln!(out, "answers_returned = {}", self.answers_returned);
        let _ = writeln!(out, "question_budget = {}", ms(self.question_budget));
        let _ = writeln!(out, "concurrency = {}", self.concurrency);
        let _ = writeln!(out, "corpus = {}", p(&self.paths.corpus));
        let _ = writeln!(out, "background_kb = {}", p(&self.paths.background_kb));
        let _ = writeln!(out, "patterns = {}", p(&self.paths.patterns));
        let _ = writeln!(
            out,
            "synonyms = {}",
            self.paths.synonyms.as_deref().map(p).unwrap_or_else(|| "none".into())
        );
        let _ = writeln!(out, "passage_model = {}", p(&self.paths.passage_model));
        let _ = writeln!(out, "answer_model = {}", p(&self.paths.answer_model));
        out
    }
}

enum SetError {
    Unknown,
    Value(String),
}
