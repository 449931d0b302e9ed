use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sa_extract::batch::{extract_corpus, grammar_header};
use sa_extract::{Bundle, Error, ExtractorConfig, Limits, Result};

#[derive(Parser)]
#[command(
    name = "sa-extract",
    version,
    about = "Suffix-array based grammar extraction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Index a word-aligned parallel corpus.
    Preprocess(PreprocessArgs),
    /// Write one grammar per sentence of a test set.
    Extract(ExtractArgs),
}

#[derive(Args)]
struct PreprocessArgs {
    /// Source side, one sentence per line. Holds `source ||| target` pairs
    /// when --target is omitted.
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    target: Option<PathBuf>,
    /// Alignment, one line of `i-j` links per sentence pair.
    #[arg(long)]
    alignment: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    limits: LimitArgs,
    #[arg(long)]
    max_samples: Option<usize>,
    /// Number of frequent phrases used for the collocation index.
    #[arg(long)]
    frequent_patterns: Option<usize>,
    #[arg(long)]
    max_pattern_len: Option<usize>,
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    bundle: PathBuf,
    /// Test set, one tokenized sentence per line.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[command(flatten)]
    limits: LimitArgs,
    #[arg(long)]
    max_samples: Option<usize>,
    /// Ignore the precomputed collocation index.
    #[arg(long)]
    no_collocations: bool,
}

#[derive(Args)]
struct LimitArgs {
    #[arg(long)]
    max_rule_span: Option<usize>,
    #[arg(long)]
    max_nonterminals: Option<usize>,
    #[arg(long)]
    max_rule_symbols: Option<usize>,
    #[arg(long)]
    min_gap_size: Option<usize>,
}

impl LimitArgs {
    fn apply(&self, base: Limits) -> Limits {
        Limits {
            max_rule_span: self.max_rule_span.unwrap_or(base.max_rule_span),
            max_nonterminals: self.max_nonterminals.unwrap_or(base.max_nonterminals),
            max_rule_symbols: self.max_rule_symbols.unwrap_or(base.max_rule_symbols),
            min_gap_size: self.min_gap_size.unwrap_or(base.min_gap_size),
        }
    }
}

fn preprocess(args: PreprocessArgs) -> Result<()> {
    let defaults = ExtractorConfig::default();
    let config = ExtractorConfig {
        limits: args.limits.apply(defaults.limits),
        max_samples: args.max_samples.unwrap_or(defaults.max_samples),
        frequent_patterns: args.frequent_patterns.unwrap_or(defaults.frequent_patterns),
        max_pattern_len: args.max_pattern_len.unwrap_or(defaults.max_pattern_len),
        threads: 1,
    };
    config.validate()?;
    let bundle = Bundle::from_files(
        &args.source,
        args.target.as_deref(),
        &args.alignment,
        &config,
    )?;
    bundle.save(&args.out)?;
    Ok(())
}

fn extract(args: ExtractArgs) -> Result<()> {
    let bundle = Bundle::load(&args.bundle)?;
    let config = ExtractorConfig {
        limits: args.limits.apply(bundle.config.limits),
        max_samples: args.max_samples.unwrap_or(bundle.config.max_samples),
        threads: args.threads,
        ..bundle.config
    };
    config.validate()?;
    let text = fs::read_to_string(&args.input).map_err(|e| match e.kind() {
        std::io::ErrorKind::InvalidData => Error::Format {
            line: 0,
            message: format!("{}: not UTF-8", args.input.display()),
        },
        _ => Error::Io {
            path: args.input.clone(),
            source: e,
        },
    })?;
    let lines: Vec<&str> = text.lines().collect();
    let extractor = bundle.extractor(config.limits, config.max_samples, !args.no_collocations);
    let header = grammar_header(&config);
    extract_corpus(&extractor, &lines, &args.out, config.threads, Some(&header))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Preprocess(args) => preprocess(args),
        Command::Extract(args) => extract(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
