mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};

use crate::error::{CliError, EXIT_USAGE};

#[derive(Parser, Debug)]
#[command(name = "citeworthy", version, about = "Citation-worthiness corpus builder and sentence labeling models")]
pub struct Cli {
    /// Flat `key = value` file with parameters for the command; flags win
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Print errors on stderr as one JSON object
    #[arg(long, global = true)]
    json_errors: bool,
    /// Log progress to stderr
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse articles, label and sanitize sentences, write a dataset
    BuildCorpus(BuildCorpusArgs),
    /// Assign documents of a dataset to train/val/test
    Split(SplitArgs),
    /// Train a model on the train part of a split
    Train(TrainArgs),
    /// Score a checkpoint on one part of a split
    Eval(EvalArgs),
    /// Label every sentence of a dataset
    Predict(PredictArgs),
    /// Agreement between automatic and manual labels of an audit sample
    Audit(AuditArgs),
}

#[derive(Args, Debug)]
pub struct BuildCorpusArgs {
    /// Directory of article files, one article file, or a JSON-lines file
    #[arg(long = "in", value_name = "PATH")]
    pub input: Option<String>,
    /// Citation pattern file (built-in set when omitted)
    #[arg(long)]
    pub patterns: Option<String>,
    /// Output dataset (JSON lines)
    #[arg(long)]
    pub out: Option<String>,
    /// Output statistics (JSON); defaults to <out>.stats.json
    #[arg(long)]
    pub stats: Option<String>,
    /// Skipped-article log (JSON lines); defaults to <out>.skipped.jsonl
    #[arg(long)]
    pub skip_log: Option<String>,
    /// Write this many random sentences for a manual labeling audit
    #[arg(long, value_name = "N")]
    pub sample_validation: Option<usize>,
    /// Audit sample file; defaults to <out>.sample.jsonl
    #[arg(long)]
    pub sample_out: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct SplitArgs {
    /// Dataset file
    #[arg(long = "in", value_name = "FILE")]
    pub input: Option<String>,
    /// Train, validation and test fractions, e.g. 0.6,0.2,0.2
    #[arg(long)]
    pub ratios: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output manifest (JSON)
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: Option<String>,
    /// Split manifest
    #[arg(long)]
    pub split: Option<String>,
    /// sc, spc or ssm
    #[arg(long)]
    pub formulation: Option<String>,
    /// Window length for ssm (even)
    #[arg(long)]
    pub m: Option<usize>,
    /// Add the section name to every context
    #[arg(long)]
    pub include_section: bool,
    /// trainable or external
    #[arg(long)]
    pub provider: Option<String>,
    /// Sentence vectors for the external provider
    #[arg(long)]
    pub vectors: Option<String>,
    /// Output checkpoint
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub d_emb: Option<usize>,
    #[arg(long)]
    pub hidden: Option<usize>,
    #[arg(long)]
    pub max_vocab: Option<usize>,
    #[arg(long)]
    pub clip_norm: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    pub data: Option<String>,
    #[arg(long)]
    pub split: Option<String>,
    /// train, val or test
    #[arg(long)]
    pub part: Option<String>,
    #[arg(long)]
    pub ckpt: Option<String>,
    /// Output report (JSON)
    #[arg(long)]
    pub report: Option<String>,
    /// Include metrics per canonical section
    #[arg(long)]
    pub by_section: bool,
    #[arg(long)]
    pub vectors: Option<String>,
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    /// Dataset file
    #[arg(long = "in", value_name = "FILE")]
    pub input: Option<String>,
    #[arg(long)]
    pub ckpt: Option<String>,
    /// Output predictions (JSON lines)
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long)]
    pub vectors: Option<String>,
}

#[derive(Args, Debug)]
pub struct AuditArgs {
    /// Audit sample with the `manual` field filled in
    #[arg(long)]
    pub sample: Option<String>,
    /// Output agreement report (JSON)
    #[arg(long)]
    pub report: Option<String>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::BuildCorpus(_) => "build-corpus",
            Command::Split(_) => "split",
            Command::Train(_) => "train",
            Command::Eval(_) => "eval",
            Command::Predict(_) => "predict",
            Command::Audit(_) => "audit",
        }
    }
}

fn usage_of(command: &str) -> String {
    let mut cmd = Cli::command();
    match cmd.find_subcommand_mut(command) {
        Some(sub) => sub.render_usage().to_string(),
        None => cmd.render_usage().to_string(),
    }
}

fn set_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("CITEWORTHY_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::usage("BadThreads", format!("CITEWORTHY_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::runtime("ThreadPool", e.to_string()))
}

fn report(err: &CliError, json: bool) -> ExitCode {
    if json {
        eprintln!("{}", err.to_json());
    } else {
        eprintln!("{err}");
    }
    ExitCode::from(err.exit_code as u8)
}

fn main() -> ExitCode {
    let json_errors = std::env::args().any(|a| a == "--json-errors");
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) if json_errors => {
            let err = CliError::usage("Usage", e.to_string().trim().to_string());
            return report(&err, true);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let name = cli.command.name();
    let result = set_threads().and_then(|_| commands::run(&cli.command, cli.config.as_deref()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(mut err) => {
            if err.code == "MissingArgument" {
                err = err.with_usage(usage_of(name));
            }
            report(&err, cli.json_errors)
        }
    }
}
