//! The `phrasebound` command line.

mod analyze;
mod config;
mod measure;
mod stimuli;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};

pub use config::{sha256_hex, LassoSettings, Overrides, Provenance, RunConfig, CONFIG_ENV};

#[derive(Debug, Parser)]
#[command(name = "phrasebound", version, about = "Probe phrase-boundary placement in synthesized speech")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML run configuration.
    #[arg(long, global = true, env = CONFIG_ENV)]
    pub config: Option<PathBuf>,
    /// Seed for cue placement, data splits and folds.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Minimum silence in seconds that counts as a pause.
    #[arg(long, global = true)]
    pub pause_threshold: Option<f64>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Significance level for effect tests.
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StimulusKind {
    GardenPath,
    Attachment,
    Eval,
    Corpus,
    FinetuneSynthetic,
    FinetuneSampled,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a stimulus set and its synthesis manifest.
    Stimuli {
        #[arg(long, value_enum)]
        kind: StimulusKind,
        /// Item table, template, lexicon, CoNLL-U file or audited corpus,
        /// depending on the kind. Built-in tables are used when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Bracketed constituency trees for `--kind corpus`.
        #[arg(long)]
        trees: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Measure boundary durations from aligned synthesis output.
    Measure {
        #[arg(long)]
        stimuli: PathBuf,
        /// Directory holding `<utterance_id>.TextGrid` files.
        #[arg(long)]
        textgrids: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pause precision/recall/F1 at clause boundaries, per system.
    Score {
        /// Measurements CSV, optionally as `SYSTEM=PATH`. Repeatable.
        #[arg(long = "input", required = true)]
        inputs: Vec<String>,
        /// CSV with `system,mos` columns to join into the report.
        #[arg(long)]
        mos: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Count prepositions, commas and pauses in an aligned corpus.
    Audit {
        /// JSONL with `utterance_id`, `transcript` and optional `audio_path`.
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        textgrids: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sparse regression of boundary durations on textual predictors.
    Regress {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        targets: PathBuf,
        /// Target column in the targets CSV.
        #[arg(long, default_value = "pause_dur")]
        target: String,
        /// Penalty to try; repeat for a grid. Replaces the default path.
        #[arg(long = "lambda")]
        lambdas: Vec<f64>,
        #[arg(long)]
        no_ablations: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pause before function words, per category and system.
    EvalFuncwords {
        /// Measurements CSV, optionally as `SYSTEM=PATH`. Repeatable.
        #[arg(long = "input", required = true)]
        inputs: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Common envelope of every JSON report.
#[derive(Debug, Serialize)]
pub(crate) struct Report<'a, T: Serialize> {
    pub command: &'static str,
    pub provenance: &'a Provenance,
    pub config: &'a RunConfig,
    pub results: T,
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::schema(path.display().to_string(), e.to_string()))?;
    s.push('\n');
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let to_err = |e: csv::Error| Error::schema(path.display().to_string(), e.to_string());
    let mut w = csv::Writer::from_path(path).map_err(to_err)?;
    for r in rows {
        w.serialize(r).map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Splits `SYSTEM=PATH`; a bare path is named after its parent directory,
/// or `default`.
pub(crate) fn system_input(arg: &str) -> (String, PathBuf) {
    match arg.split_once('=') {
        Some((name, path)) if !name.is_empty() => (name.to_string(), PathBuf::from(path)),
        _ => {
            let path = PathBuf::from(arg);
            let name = path
                .parent()
                .and_then(|p| p.file_name())
                .map_or_else(|| "default".to_string(), |n| n.to_string_lossy().into_owned());
            (name, path)
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    let cfg = RunConfig::load(
        g.config.as_deref(),
        Overrides { seed: g.seed, pause_threshold: g.pause_threshold, workers: g.workers, alpha: g.alpha },
    )?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Usage(format!("cannot start {} workers: {e}", cfg.workers)))?;
    pool.install(|| match cli.command {
        Command::Stimuli { kind, input, trees, out } => stimuli::run(&cfg, kind, input.as_deref(), trees.as_deref(), &out),
        Command::Measure { stimuli, textgrids, out } => measure::run(&cfg, &stimuli, &textgrids, &out),
        Command::Score { inputs, mos, out } => analyze::score(&cfg, &inputs, mos.as_deref(), &out),
        Command::Audit { corpus, textgrids, out } => analyze::audit(&cfg, &corpus, &textgrids, &out),
        Command::Regress { features, targets, target, lambdas, no_ablations, out } => {
            analyze::regress(&cfg, &features, &targets, &target, &lambdas, !no_ablations, &out)
        }
        Command::EvalFuncwords { inputs, out } => analyze::eval_funcwords(&cfg, &inputs, &out),
    })
}
