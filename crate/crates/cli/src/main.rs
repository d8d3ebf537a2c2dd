//! Command-line driver for the dasmine pipeline.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data errors (the
//! offending record or file is named in the message).

mod commands;
mod config;
mod reports;

use clap::{Args, Parser, Subcommand};
use config::PipelineConfig;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "dasmine",
    version,
    about = "Mine data availability statements from JATS corpora, classify them, and fit the citation-prediction regression"
)]
struct Cli {
    /// Store directory (overrides config and DASMINE_STORE)
    #[arg(long, global = true)]
    store: Option<PathBuf>,

    /// Pipeline config file (TOML)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads (0 = all cores)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Directory for emitted CSV artifacts (default: <store>/out)
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a directory tree of JATS XML files into the record store
    Ingest(IngestArgs),
    /// Extract data availability statements from stored records
    ExtractDas(ExtractArgs),
    /// Train the statement classifier (grid search by default)
    Train(TrainArgs),
    /// Categorize every stored statement with the trained model
    Classify,
    /// Score the trained model on the held-out split of the labels
    Evaluate,
    /// Assemble the regression dataset for a citation window
    BuildTable(BuildTableArgs),
    /// Fit the citation-prediction model (OLS and robust LS)
    Regress(RegressArgs),
    /// Emit the das-over-time, descriptives and correlation reports
    Report,
    /// Export flat CSV views of store sections
    Export(ExportArgs),
}

#[derive(Args, Debug)]
struct IngestArgs {
    /// Directory tree of .xml / .xml.gz files
    input: PathBuf,
    /// journals.csv (journal_title, publisher, encouraged_from, required_from)
    #[arg(long)]
    journals: Option<PathBuf>,
    /// Extraction rules TOML (defaults to the built-in PLOS/BMC rules)
    #[arg(long)]
    rules: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    #[arg(long)]
    rules: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    /// labels.csv (text, category, frequency)
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Train a single classifier instead of running the grid search
    #[arg(long)]
    classifier: Option<dasmine::classify::ClassifierKind>,
    /// Stop-word list file (one token per line)
    #[arg(long)]
    stopword_list: Option<PathBuf>,
    #[arg(long, overrides_with = "no_stem")]
    stem: bool,
    #[arg(long)]
    no_stem: bool,
    #[arg(long, overrides_with = "no_stopwords")]
    stopwords: bool,
    #[arg(long)]
    no_stopwords: bool,
    /// Stratified split seed
    #[arg(long)]
    seed: Option<u64>,
    /// SVM regularization strength
    #[arg(long)]
    lambda: Option<f64>,
    /// SVM training epochs
    #[arg(long)]
    epochs: Option<usize>,
}

#[derive(Args, Debug)]
struct BuildTableArgs {
    /// Citation window in years
    #[arg(long)]
    window: Option<u32>,
    #[arg(long)]
    taxonomy: Option<PathBuf>,
    #[arg(long)]
    journals: Option<PathBuf>,
    /// Count same-month works when computing H-indexes at publication
    /// time (default: strictly earlier only)
    #[arg(long)]
    h_cutoff_inclusive: bool,
}

#[derive(Args, Debug)]
struct RegressArgs {
    /// Citation window the table must have been built for
    #[arg(long)]
    window: Option<u32>,
}

#[derive(Args, Debug)]
struct ExportArgs {
    /// What to export
    #[arg(value_enum)]
    what: ExportTarget,
    /// Output file (default: <out-dir>/<what>.csv)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum ExportTarget {
    Authors,
    Citations,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own message; help/version exit 0, genuine
            // usage errors exit 1
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| anyhow::anyhow!("thread pool: {e}"))?;
    }

    let mut config = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Ok(store) = std::env::var("DASMINE_STORE") {
        if !store.is_empty() {
            config.store = PathBuf::from(store);
        }
    }
    if let Some(store) = &cli.store {
        config.store = store.clone();
    }
    config.check_referenced_files()?;

    let out_dir = cli.out_dir.clone().unwrap_or_else(|| config.store.join("out"));
    let ctx = commands::Context { config, out_dir };

    match cli.command {
        Command::Ingest(args) => commands::ingest(&ctx, &args.input, args.journals, args.rules),
        Command::ExtractDas(args) => commands::extract_das(&ctx, args.rules),
        Command::Train(args) => commands::train(&ctx, &args),
        Command::Classify => commands::classify(&ctx),
        Command::Evaluate => commands::evaluate(&ctx),
        Command::BuildTable(args) => commands::build_table(&ctx, &args),
        Command::Regress(args) => commands::regress(&ctx, &args),
        Command::Report => commands::report(&ctx),
        Command::Export(args) => {
            let what = match args.what {
                ExportTarget::Authors => "authors",
                ExportTarget::Citations => "citations",
            };
            commands::export(&ctx, what, args.out)
        }
    }
}
