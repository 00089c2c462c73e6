use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use clap::{Parser, ValueEnum};
use sha2::{Digest, Sha256};
use wordseg::experiments::{run_experiment, ExperimentKind, ExperimentSpec};
use wordseg::{Corpus, DenominatorMode, Order, PhonemeInventory, PhonemeMode, TrainFraction};

/// Run word-segmentation experiments over a segmented phonemic corpus and
/// write CSV reports.
#[derive(Debug, Parser)]
#[command(name = "wordseg", version)]
struct Args {
    /// Corpus file: one utterance per line, words separated by single spaces.
    #[arg(long)]
    corpus: PathBuf,

    /// Phoneme inventory file (one symbol per line). Defaults to the built-in
    /// 50-symbol English alphabet.
    #[arg(long)]
    inventory: Option<PathBuf>,

    /// Model orders to run, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [1u8, 2, 3], value_parser = clap::value_parser!(u8).range(1..=3))]
    order: Vec<u8>,

    #[arg(long, value_enum, default_value_t = PhonemeArg::Lexicon)]
    phoneme_mode: PhonemeArg,

    #[arg(long, value_enum, default_value_t = DenominatorArg::Context)]
    denominator: DenominatorArg,

    /// Number of permutation runs. Defaults depend on the experiment.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    runs: Option<u64>,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    block_size: u64,

    /// Fraction of each permutation trained on gold before segmenting,
    /// as a decimal (0.25) or ratio (1/4).
    #[arg(long, default_value = "0")]
    train_fraction: TrainFraction,

    #[arg(long, value_enum, default_value_t = ExperimentArg::Baseline)]
    experiment: ExperimentArg,

    /// Training-sweep step, in percent.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=100))]
    sweep_step: u64,

    /// Largest training percentage in the sweep.
    #[arg(long, default_value_t = 75, value_parser = clap::value_parser!(u64).range(0..=100))]
    sweep_cap: u64,

    /// Lexicon-growth sampling interval, in percent.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=100))]
    growth_step: u64,

    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PhonemeArg {
    Uniform,
    Lexicon,
    Corpus,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DenominatorArg {
    Context,
    AsWritten,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExperimentArg {
    Baseline,
    TrainSweep,
    FullyTrained,
    PhonemeMatrix,
    LexiconGrowth,
}

impl Args {
    fn spec(&self) -> ExperimentSpec {
        let kind = match self.experiment {
            ExperimentArg::Baseline => ExperimentKind::Baseline,
            ExperimentArg::TrainSweep => ExperimentKind::TrainSweep,
            ExperimentArg::FullyTrained => ExperimentKind::FullyTrained,
            ExperimentArg::PhonemeMatrix => ExperimentKind::PhonemeMatrix,
            ExperimentArg::LexiconGrowth => ExperimentKind::LexiconGrowth,
        };
        let mut spec = ExperimentSpec::new(kind);
        if let Some(r) = self.runs {
            spec.runs = r as usize;
        }
        spec.base_seed = self.seed;
        let mut orders: Vec<Order> = self
            .order
            .iter()
            .map(|&k| Order::from_u8(k).expect("range checked"))
            .collect();
        orders.sort();
        orders.dedup();
        spec.orders = orders;
        spec.config.model.phoneme_mode = match self.phoneme_mode {
            PhonemeArg::Uniform => PhonemeMode::Uniform,
            PhonemeArg::Lexicon => PhonemeMode::Lexicon,
            PhonemeArg::Corpus => PhonemeMode::Corpus,
        };
        spec.config.model.denominator = match self.denominator {
            DenominatorArg::Context => DenominatorMode::Context,
            DenominatorArg::AsWritten => DenominatorMode::AsWritten,
        };
        spec.config.block_size = self.block_size as usize;
        spec.config.train_fraction = self.train_fraction;
        spec.config.seed = self.seed;
        spec.sweep_step_percent = self.sweep_step;
        spec.sweep_cap_percent = self.sweep_cap;
        spec.growth_step_percent = self.growth_step;
        spec
    }
}

enum Failure {
    Usage(anyhow::Error),
    Input(anyhow::Error),
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn manifest(args: &Args, spec: &ExperimentSpec, corpus: &Corpus, digest: &str) -> anyhow::Result<String> {
    let stats = corpus.stats()?;
    let orders: Vec<String> = spec.orders.iter().map(|o| o.to_string()).collect();
    let lines = [
        ("wordseg_version", env!("CARGO_PKG_VERSION").to_string()),
        ("experiment", spec.kind.to_string()),
        ("orders", orders.join(",")),
        ("phoneme_mode", spec.config.model.phoneme_mode.to_string()),
        ("denominator", spec.config.model.denominator.to_string()),
        ("phoneme_prior", spec.config.model.phoneme_prior.to_string()),
        ("runs", spec.runs.to_string()),
        ("base_seed", spec.base_seed.to_string()),
        ("block_size", spec.config.block_size.to_string()),
        ("train_fraction", spec.config.train_fraction.to_string()),
        ("sweep_step_percent", spec.sweep_step_percent.to_string()),
        ("sweep_cap_percent", spec.sweep_cap_percent.to_string()),
        ("growth_step_percent", spec.growth_step_percent.to_string()),
        ("corpus", args.corpus.display().to_string()),
        ("corpus_sha256", digest.to_string()),
        ("utterances", stats.utterances.to_string()),
        ("tokens", stats.tokens.to_string()),
        ("distinct_words", stats.distinct_words.to_string()),
        ("inventory_size", corpus.inventory().len().to_string()),
    ];
    Ok(lines.iter().map(|(k, v)| format!("{k}={v}\n")).collect())
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    let path = dir.join(name);
    fs::write(&path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::Usage)
}

fn execute(args: Args) -> Result<(), Failure> {
    let inventory = match &args.inventory {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading inventory {}", path.display()))
                .map_err(Failure::Input)?;
            PhonemeInventory::parse(&text)
                .with_context(|| format!("parsing inventory {}", path.display()))
                .map_err(Failure::Input)?
        }
        None => PhonemeInventory::english(),
    };
    let bytes = fs::read(&args.corpus)
        .with_context(|| format!("reading corpus {}", args.corpus.display()))
        .map_err(Failure::Input)?;
    let digest = hex(&Sha256::digest(&bytes));
    let corpus = Corpus::parse(&bytes, Arc::new(inventory))
        .with_context(|| format!("parsing corpus {}", args.corpus.display()))
        .map_err(Failure::Input)?;

    let spec = args.spec();
    spec.validate().map_err(|e| Failure::Usage(e.into()))?;
    let manifest = manifest(&args, &spec, &corpus, &digest).map_err(Failure::Input)?;
    log::info!(
        "{} over {} utterances, {} run(s) per order",
        spec.kind,
        corpus.len(),
        spec.runs
    );

    let files = run_experiment(&corpus, &spec).map_err(|e| Failure::Input(e.into()))?;
    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))
        .map_err(Failure::Usage)?;
    for f in &files {
        write_file(&args.out, &f.name, &f.contents)?;
        log::info!("wrote {}", f.name);
    }
    write_file(&args.out, "manifest.txt", &manifest)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
