//! Command-line front end: `ask`, `serve`, `train`, `check-kb`, `bench`,
//! `dump-features`.

pub mod http;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use logquest::logic::Origin;
use logquest::parser::parse_kb;
use logquest::pipeline::{
    answer_training_set, load_gold, passage_training_set, run_bench, AskOptions, Engine, PipelineConfig, CONFIG_ENV,
};
use logquest::prover::validate_input;
use logquest::ranker::TrainingSet;
use logquest::ranker::{train, LinearModel, ModelKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USER: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    /// Bad input: flags, files, questions.
    User(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::User(_) => EXIT_USER,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::User(m) | CliError::Internal(m) => f.write_str(m),
        }
    }
}

fn user(e: impl std::fmt::Display) -> CliError {
    CliError::User(e.to_string())
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

#[derive(Parser, Debug)]
#[command(
    name = "logquest",
    version,
    about = "Question answering over a corpus with logical proofs"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Engine options; each flag overrides the config-file key of the same name.
#[derive(Args, Debug, Default)]
pub struct GlobalArgs {
    /// Config file (key = value lines); defaults to $LOGQUEST_CONFIG.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Asset directory with corpus/, kb/, patterns/, lexicon/, models/, eval/.
    #[arg(long, global = true)]
    pub assets: Option<PathBuf>,
    #[arg(long, global = true)]
    pub top_k_passages: Option<String>,
    /// e.g. 200ms
    #[arg(long, global = true)]
    pub per_candidate_budget: Option<String>,
    #[arg(long, global = true)]
    pub max_relax: Option<String>,
    #[arg(long, global = true)]
    pub max_level: Option<String>,
    #[arg(long, global = true)]
    pub max_branches: Option<String>,
    #[arg(long, global = true)]
    pub answers_returned: Option<String>,
    /// e.g. 10s
    #[arg(long, global = true)]
    pub question_budget: Option<String>,
    #[arg(long, global = true)]
    pub concurrency: Option<String>,
    #[arg(long, global = true)]
    pub corpus: Option<String>,
    #[arg(long, global = true)]
    pub background_kb: Option<String>,
    #[arg(long, global = true)]
    pub patterns: Option<String>,
    /// Synonym lexicon, or `none`.
    #[arg(long, global = true)]
    pub synonyms: Option<String>,
    #[arg(long, global = true)]
    pub passage_model: Option<String>,
    #[arg(long, global = true)]
    pub answer_model: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Answer one question.
    Ask {
        question: String,
        /// Print the answer records as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run the HTTP API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: String,
    },
    /// Fit a ranking model from a feature CSV.
    Train {
        #[arg(long, value_parser = parse_kind)]
        model_kind: ModelKind,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        lr: f64,
        #[arg(long, default_value_t = 100)]
        epochs: usize,
        #[arg(long)]
        out: PathBuf,
        /// Start from this model instead of zeros.
        #[arg(long)]
        init: Option<PathBuf>,
    },
    /// Parse a knowledge base and report on range restriction.
    CheckKb { file: PathBuf },
    /// Run the gold question set.
    Bench {
        /// Gold TSV; defaults to eval/gold.tsv under the asset directory.
        #[arg(long)]
        gold: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Write labelled training features derived from the gold set.
    DumpFeatures {
        #[arg(long, value_parser = parse_kind)]
        model_kind: ModelKind,
        #[arg(long)]
        gold: Option<PathBuf>,
        /// Output CSV; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_kind(s: &str) -> Result<ModelKind, String> {
    s.parse().map_err(|e: logquest::ranker::ModelError| e.to_string())
}

/// Assets shipped with the source tree.
pub fn builtin_asset_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../assets")
}

impl GlobalArgs {
    pub fn asset_root(&self) -> PathBuf {
        if let Some(root) = &self.assets {
            return root.clone();
        }
        let local = PathBuf::from("assets");
        if local.join("kb/background.lkb").is_file() {
            local
        } else {
            builtin_asset_root()
        }
    }

    /// Defaults, then the config file, then flags.
    pub fn resolve_config(&self) -> Result<PipelineConfig, CliError> {
        let config_path = self.config.clone().or_else(|| {
            std::env::var_os(CONFIG_ENV)
                .filter(|v| !v.is_empty())
                .map(PathBuf::from)
        });
        let mut config = match &config_path {
            Some(path) => {
                let base = path.parent().unwrap_or(Path::new("."));
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::User(format!("cannot read config {}: {e}", path.display())))?;
                PipelineConfig::with_asset_root(self.assets.clone().unwrap_or_else(|| self.asset_root()))
                    .apply_text(&text, base)
                    .map_err(|e| CliError::User(format!("{}: {e}", path.display())))?
            }
            None => PipelineConfig::with_asset_root(self.asset_root()),
        };
        let flags = [
            ("top_k_passages", &self.top_k_passages),
            ("per_candidate_budget", &self.per_candidate_budget),
            ("max_relax", &self.max_relax),
            ("max_level", &self.max_level),
            ("max_branches", &self.max_branches),
            ("answers_returned", &self.answers_returned),
            ("question_budget", &self.question_budget),
            ("concurrency", &self.concurrency),
            ("corpus", &self.corpus),
            ("background_kb", &self.background_kb),
            ("patterns", &self.patterns),
            ("synonyms", &self.synonyms),
            ("passage_model", &self.passage_model),
            ("answer_model", &self.answer_model),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                config
                    .set_option(key, v)
                    .map_err(|e| CliError::User(format!("--{}: {e}", key.replace('_', "-"))))?;
            }
        }
        config.validate().map_err(user)?;
        Ok(config)
    }

    fn engine(&self) -> Result<Engine, CliError> {
        Engine::load(self.resolve_config()?).map_err(user)
    }

    fn gold_path(&self, explicit: &Option<PathBuf>) -> PathBuf {
        explicit
            .clone()
            .unwrap_or_else(|| self.asset_root().join("eval/gold.tsv"))
    }
}

/// Parses `args` (program name first) and runs the command; returns the
/// process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USER } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Ask { question, json } => ask(g, question, *json, out),
        Command::Serve { bind } => {
            let engine = Arc::new(g.engine()?);
            let runtime = tokio::runtime::Builder::new_multi_thread()
                .enable_all()
                .build()
                .map_err(internal)?;
            runtime
                .block_on(http::serve(engine, bind))
                .map_err(|e| CliError::User(format!("cannot serve on {bind}: {e}")))?;
            Ok(EXIT_OK)
        }
        Command::Train {
            model_kind,
            data,
            lr,
            epochs,
            out: model_out,
            init,
        } => {
            let data = TrainingSet::load_csv(*model_kind, data).map_err(user)?;
            let init = match init {
                Some(p) => LinearModel::load(p).map_err(user)?,
                None => LinearModel::zeros(*model_kind),
            };
            if init.kind() != *model_kind {
                return Err(CliError::User(format!("--init is a {} model", init.kind())));
            }
            let (model, history) = train(&init, &data, *lr, *epochs).map_err(user)?;
            model.save(model_out).map_err(internal)?;
            let first = history.first().copied().unwrap_or(f64::NAN);
            let last = history.last().copied().unwrap_or(f64::NAN);
            writeln!(
                out,
                "trained {model_kind} model on {} rows, {epochs} epochs: loss {first:.6} -> {last:.6}",
                data.rows.len()
            )
            .map_err(internal)?;
            writeln!(out, "wrote {}", model_out.display()).map_err(internal)?;
            Ok(EXIT_OK)
        }
        Command::CheckKb { file } => check_kb(file, out, err),
        Command::Bench { gold, json } => {
            let engine = g.engine()?;
            let gold = load_gold(g.gold_path(gold)).map_err(user)?;
            let report = run_bench(&engine, &gold);
            if *json {
                let rows: Vec<_> = report
                    .rows
                    .iter()
                    .map(|r| {
                        serde_json::json!({
                            "question": r.question,
                            "expected": r.expected,
                            "answers": r.answers,
                            "correct": r.correct,
                            "latency_ms": r.latency.as_secs_f64() * 1e3,
                            "error": r.error,
                        })
                    })
                    .collect();
                let doc = serde_json::json!({
                    "questions": report.rows.len(),
                    "depth": report.depth,
                    "accuracy": report.accuracy(),
                    "latency_ms": {
                        "p50": report.latency_percentile(50.0).as_secs_f64() * 1e3,
                        "p90": report.latency_percentile(90.0).as_secs_f64() * 1e3,
                        "p99": report.latency_percentile(99.0).as_secs_f64() * 1e3,
                    },
                    "rows": rows,
                });
                writeln!(out, "{}", serde_json::to_string_pretty(&doc).map_err(internal)?).map_err(internal)?;
            } else {
                for r in report.rows.iter().filter(|r| !r.correct) {
                    let got = r.error.clone().unwrap_or_else(|| format!("{:?}", r.answers));
                    writeln!(out, "MISS {}  expected {:?}, got {got}", r.question, r.expected).map_err(internal)?;
                }
                writeln!(out, "{}", report.summary()).map_err(internal)?;
            }
            Ok(EXIT_OK)
        }
        Command::DumpFeatures {
            model_kind,
            gold,
            out: csv_out,
        } => {
            let engine = g.engine()?;
            let gold = load_gold(g.gold_path(gold)).map_err(user)?;
            let set = match model_kind {
                ModelKind::Passage => passage_training_set(&engine, &gold),
                ModelKind::Answer => answer_training_set(&engine, &gold),
            };
            let positives = set.rows.iter().filter(|(_, y)| *y).count();
            match csv_out {
                Some(path) => {
                    std::fs::write(path, set.to_csv()).map_err(internal)?;
                    writeln!(
                        err,
                        "wrote {} rows ({positives} positive) to {}",
                        set.rows.len(),
                        path.display()
                    )
                    .map_err(internal)?;
                }
                None => out.write_all(set.to_csv().as_bytes()).map_err(internal)?,
            }
            Ok(EXIT_OK)
        }
    }
}

fn ask(g: &GlobalArgs, question: &str, json: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    let engine = g.engine()?;
    let outcome = engine.ask(question, &AskOptions::default()).map_err(user)?;
    if json {
        let doc = serde_json::json!({
            "query": outcome.query.to_string(),
            "answers": outcome.records,
            "diagnostic": outcome.diagnostic.map(|d| d.message()),
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).map_err(internal)?).map_err(internal)?;
        return Ok(EXIT_OK);
    }
    writeln!(out, "query: {}", outcome.query).map_err(internal)?;
    for (i, r) in outcome.records.iter().enumerate() {
        writeln!(
            out,
            "{}. {}  (confidence {:.3}, passage {})",
            i + 1,
            r.answer_text,
            r.confidence,
            r.passage_id
        )
        .map_err(internal)?;
        if r.relax_count > 0 {
            writeln!(out, "   relaxed: dropped {}", r.dropped_subgoals.join(", ")).map_err(internal)?;
        }
        writeln!(out, "   {}", mark_spans(&r.passage_text, &r.highlight_spans)).map_err(internal)?;
    }
    if let Some(d) = outcome.diagnostic {
        writeln!(out, "note: {d}").map_err(internal)?;
    }
    Ok(EXIT_OK)
}

/// Wraps highlighted byte ranges in `[` `]`.
pub fn mark_spans(text: &str, spans: &[(usize, usize)]) -> String {
    let mut s = String::with_capacity(text.len() + 2 * spans.len());
    let mut at = 0;
    for &(start, end) in spans {
        s.push_str(&text[at..start]);
        s.push('[');
        s.push_str(&text[start..end]);
        s.push(']');
        at = end;
    }
    s.push_str(&text[at..]);
    s
}

fn check_kb(file: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(file).map_err(|e| CliError::User(format!("{}: {e}", file.display())))?;
    let mut clauses = Vec::new();
    let mut syntax_errors = 0;
    let mut unrestricted = 0;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        match parse_kb(line, Origin::Background) {
            Ok(parsed) => {
                for clause in parsed {
                    if !clause.is_range_restricted() {
                        unrestricted += 1;
                        writeln!(
                            out,
                            "{}:{lineno}: not range restricted, dom/1 guards will be added: {clause}",
                            file.display()
                        )
                        .map_err(internal)?;
                    }
                    clauses.push(clause);
                }
            }
            Err(e) => {
                syntax_errors += 1;
                writeln!(
                    err,
                    "{}:{lineno}:{}: {} (found {})",
                    file.display(),
                    e.column,
                    e.message,
                    e.found
                )
                .map_err(internal)?;
            }
        }
    }
    let validation = validate_input(&clauses, None);
    if let Err(e) = &validation {
        writeln!(err, "{}: {e}", file.display()).map_err(internal)?;
    }
    writeln!(
        out,
        "{}: {} clauses, {} range restricted, {} need guards, {} syntax errors",
        file.display(),
        clauses.len(),
        clauses.len() - unrestricted,
        unrestricted,
        syntax_errors
    )
    .map_err(internal)?;
    Ok(if syntax_errors > 0 || validation.is_err() {
        EXIT_USER
    } else {
        EXIT_OK
    })
}
