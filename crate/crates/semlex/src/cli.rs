//! Command-line pipeline: corpus files in, TSV lists out.
//!
//! Four subcommands: `freq` lists the most frequent head nouns to help
//! pick seeds, `extract` writes the raw counts file, `run` drives the
//! full bootstrap and writes the head list, compound list, and a run
//! report, and `synth` renders a synthetic corpus from a TOML spec.
//!
//! Every command is deterministic for fixed inputs (plus the rng seed for
//! `synth`): outputs carry no timestamps, and all files are written only
//! after the whole computation has succeeded, so a failing run leaves no
//! partial output behind.

use std::cmp::Reverse;
use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::bootstrap::{self, BootstrapConfig, BootstrapError, BootstrapOutcome};
use crate::compound::{self, CompoundEntry};
use crate::extract::{self, ExtractResult, PairMultiplicity};
use crate::morph::{Exceptions, Lexicon, MorphError, Morphology, SeedEntry};
use crate::synth;
use crate::treebank::{self, Tree};

/// Errors carrying their process exit code: 1 for usage and
/// configuration, 2 for input that fails to parse, 3 for internal
/// invariant violations.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

fn morph_error(err: MorphError) -> CliError {
    match err {
        MorphError::BadLine { .. } => CliError::Usage(err.to_string()),
        // The tree parser never yields empty tokens, so this cannot come
        // from user input.
        MorphError::EmptySurface => CliError::Internal(err.to_string()),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "semlex",
    version,
    about = "Bootstraps category lexicons and compound lists from bracketed corpora"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the most frequent head nouns of a corpus.
    Freq(FreqArgs),
    /// Write co-occurrence, compound, and frequency counts to a file.
    Extract(ExtractArgs),
    /// Run the full pipeline: head list, compound list, and report.
    Run(RunArgs),
    /// Generate a synthetic bracketed corpus from a TOML spec.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MultiplicityArg {
    Sentence,
    Construction,
}

impl From<MultiplicityArg> for PairMultiplicity {
    fn from(arg: MultiplicityArg) -> Self {
        match arg {
            MultiplicityArg::Sentence => PairMultiplicity::Sentence,
            MultiplicityArg::Construction => PairMultiplicity::Construction,
        }
    }
}

/// Flags every subcommand accepts.
#[derive(Debug, Args)]
struct CommonArgs {
    /// Plain key=value settings file; command-line flags win.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (default: current directory).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FreqArgs {
    /// Bracketed corpus files.
    #[arg(required = true, value_name = "CORPUS")]
    corpus: Vec<PathBuf>,
    /// How many lemmas to list.
    #[arg(long, value_name = "N")]
    top: Option<usize>,
    /// Irregular-plural exceptions file.
    #[arg(long, value_name = "PATH")]
    exceptions: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct ExtractArgs {
    /// Bracketed corpus files.
    #[arg(required = true, value_name = "CORPUS")]
    corpus: Vec<PathBuf>,
    /// Count pairs once per sentence or once per witnessing NP.
    #[arg(long, value_enum, value_name = "MODE")]
    pair_multiplicity: Option<MultiplicityArg>,
    /// Irregular-plural exceptions file.
    #[arg(long, value_name = "PATH")]
    exceptions: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Bracketed corpus files.
    #[arg(required = true, value_name = "CORPUS")]
    corpus: Vec<PathBuf>,
    /// Seed lemma file, one display form per line (e.g. "car(s)").
    #[arg(long, value_name = "PATH")]
    seeds: Option<PathBuf>,
    /// Rounds per bootstrap phase.
    #[arg(long, value_name = "N")]
    iterations: Option<usize>,
    /// Compound modifier ratio cutoff in [0,1].
    #[arg(long, value_name = "R")]
    cutoff: Option<f64>,
    /// Minimum head-noun occurrences for bootstrap candidates.
    #[arg(long, value_name = "N")]
    min_occurrence: Option<u64>,
    /// Count pairs once per sentence or once per witnessing NP.
    #[arg(long, value_enum, value_name = "MODE")]
    pair_multiplicity: Option<MultiplicityArg>,
    /// Irregular-plural exceptions file.
    #[arg(long, value_name = "PATH")]
    exceptions: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Generator spec (TOML).
    #[arg(value_name = "SPEC")]
    spec: PathBuf,
    /// Seed for the generator's random stream.
    #[arg(long, value_name = "N")]
    rng_seed: Option<u64>,
    #[command(flatten)]
    common: CommonArgs,
}

/// Settings a key=value config file may supply. Keys match the long flag
/// names.
#[derive(Debug, Default, PartialEq)]
pub struct FileConfig {
    iterations: Option<usize>,
    cutoff: Option<f64>,
    min_occurrence: Option<u64>,
    pair_multiplicity: Option<MultiplicityArg>,
    seeds: Option<PathBuf>,
    out: Option<PathBuf>,
    exceptions: Option<PathBuf>,
    rng_seed: Option<u64>,
    top: Option<usize>,
}

impl FileConfig {
    /// Parses `key = value` lines; `#` starts a comment line, unknown keys
    /// and malformed values are usage errors naming `path` and the line.
    pub fn parse(text: &str, path: &str) -> Result<FileConfig, CliError> {
        let mut config = FileConfig::default();
        for (number, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |message: String| {
                CliError::Usage(format!("{path}:{}: {message}", number + 1))
            };
            let Some((key, value)) = line.split_once('=') else {
                return Err(bad(format!("expected key=value, got {line:?}")));
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "iterations" => {
                    config.iterations =
                        Some(value.parse().map_err(|_| bad(format!("bad count {value:?}")))?);
                }
                "cutoff" => {
                    config.cutoff =
                        Some(value.parse().map_err(|_| bad(format!("bad ratio {value:?}")))?);
                }
                "min-occurrence" => {
                    config.min_occurrence =
                        Some(value.parse().map_err(|_| bad(format!("bad count {value:?}")))?);
                }
                "pair-multiplicity" => {
                    config.pair_multiplicity = Some(match value {
                        "sentence" => MultiplicityArg::Sentence,
                        "construction" => MultiplicityArg::Construction,
                        other => {
                            return Err(bad(format!(
                                "pair-multiplicity must be sentence or construction, got {other:?}"
                            )))
                        }
                    });
                }
                "seeds" => config.seeds = Some(PathBuf::from(value)),
                "out" => config.out = Some(PathBuf::from(value)),
                "exceptions" => config.exceptions = Some(PathBuf::from(value)),
                "rng-seed" => {
                    config.rng_seed =
                        Some(value.parse().map_err(|_| bad(format!("bad seed {value:?}")))?);
                }
                "top" => {
                    config.top =
                        Some(value.parse().map_err(|_| bad(format!("bad count {value:?}")))?);
                }
                other => return Err(bad(format!("unknown setting {other:?}"))),
            }
        }
        Ok(config)
    }

    fn load(path: Option<&Path>) -> Result<FileConfig, CliError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = fs::read_to_string(path).map_err(|err| {
            CliError::Usage(format!("cannot read config {}: {err}", path.display()))
        })?;
        FileConfig::parse(&text, &path.display().to_string())
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|err| CliError::Usage(format!("cannot read {}: {err}", path.display())))
}

/// Parses every corpus file, concatenating the sentences in argument
/// order. Parse failures name the file and byte offset.
fn load_corpus(paths: &[PathBuf]) -> Result<Vec<Tree>, CliError> {
    let mut trees = Vec::new();
    for path in paths {
        let text = read_input(path)?;
        let parsed = treebank::parse_trees(&text).map_err(|err| {
            CliError::Input(format!("{}:{}: {err}", path.display(), err.offset()))
        })?;
        trees.extend(parsed);
    }
    Ok(trees)
}

fn load_morphology(exceptions: Option<&Path>) -> Result<Morphology, CliError> {
    let exceptions = match exceptions {
        Some(path) => Exceptions::load(path).map_err(morph_error)?,
        None => Exceptions::default(),
    };
    Ok(Morphology::new(exceptions))
}

fn write_output(dir: &Path, name: &str, content: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|err| {
        CliError::Usage(format!("cannot create output directory {}: {err}", dir.display()))
    })?;
    let path = dir.join(name);
    fs::write(&path, content)
        .map_err(|err| CliError::Usage(format!("cannot write {}: {err}", path.display())))
}

/// Frequency list: `display<TAB>count`, descending count, display breaking
/// ties.
fn render_freq(result: &ExtractResult, top: usize) -> String {
    let mut rows: Vec<(String, u64, String)> = result
        .cooc
        .freq_rows()
        .into_iter()
        .map(|(key, count)| (result.lexicon.display(key), count, key.to_string()))
        .collect();
    rows.sort_by(|a, b| (Reverse(a.1), &a.0, &a.2).cmp(&(Reverse(b.1), &b.0, &b.2)));
    rows.truncate(top);
    let mut out = String::new();
    for (display, count, _) in rows {
        out.push_str(&format!("{display}\t{count}\n"));
    }
    out
}

/// Head list: `rank<TAB>display<TAB>iteration<TAB>score`.
fn render_heads(entries: &[bootstrap::RankedEntry], lexicon: &Lexicon) -> String {
    let mut out = String::new();
    for (rank, entry) in entries.iter().enumerate() {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            rank + 1,
            lexicon.display(&entry.lemma),
            entry.iteration,
            entry.score
        ));
    }
    out
}

/// Compound list: `head_rank<TAB>modifiers and head`, plural convention on
/// the head only.
fn render_compounds(entries: &[CompoundEntry], lexicon: &Lexicon) -> String {
    let mut out = String::new();
    for entry in entries {
        let mut words: Vec<String> = entry.kept_tokens[..entry.kept_tokens.len() - 1]
            .iter()
            .map(|key| lexicon.display_bare(key))
            .collect();
        words.push(lexicon.display(&entry.head));
        out.push_str(&format!("{}\t{}\n", entry.head_rank, words.join(" ")));
    }
    out
}

fn render_phase(name: &str, trace: &bootstrap::PhaseTrace) -> String {
    let stop = match trace.early_stop {
        Some(round) => format!("early stop at round {round}"),
        None => "no early stop".to_string(),
    };
    format!(
        "{name}: pool {}, rounds run {}, {}, added {}\n",
        trace.pool_size,
        trace.rounds_run,
        stop,
        trace.additions().len()
    )
}

/// Plain-text run report: what was configured, what each phase did.
fn render_report(
    sentences: usize,
    settings: &RunSettings,
    outcome: &BootstrapOutcome,
    lexicon: &Lexicon,
    compound_occurrences: usize,
    compound_entries: usize,
) -> String {
    let display_set = |lemmas: &BTreeSet<String>| {
        lemmas.iter().map(|l| lexicon.display(l)).collect::<Vec<_>>().join(", ")
    };
    let mut out = String::new();
    out.push_str(&format!("corpus sentences: {sentences}\n"));
    out.push_str(&format!(
        "pair multiplicity: {}\n",
        match settings.multiplicity {
            PairMultiplicity::Sentence => "sentence",
            PairMultiplicity::Construction => "construction",
        }
    ));
    out.push_str(&format!("iterations configured: {}\n", settings.iterations));
    out.push_str(&format!("min occurrence: {}\n", settings.min_occurrence));
    out.push_str(&format!("cutoff: {}\n", settings.cutoff));
    out.push_str(&format!(
        "seeds used ({}): {}\n",
        outcome.phase1.initial_seeds.len(),
        display_set(&outcome.phase1.initial_seeds)
    ));
    if !outcome.ignored_seeds.is_empty() {
        out.push_str(&format!(
            "seeds ignored ({}): {}\n",
            outcome.ignored_seeds.len(),
            outcome.ignored_seeds.join(", ")
        ));
    }
    out.push_str(&render_phase("selection phase", &outcome.phase1));
    out.push_str(&render_phase("ranking phase", &outcome.phase2));
    out.push_str(&format!("head entries: {}\n", outcome.entries.len()));
    out.push_str(&format!("compound occurrences: {compound_occurrences}\n"));
    out.push_str(&format!("compound entries: {compound_entries}\n"));
    out
}

fn cmd_freq(args: FreqArgs) -> Result<(), CliError> {
    let config = FileConfig::load(args.common.config.as_deref())?;
    let top = args.top.or(config.top).unwrap_or(200);
    if top == 0 {
        return Err(CliError::Usage("--top must be at least 1".into()));
    }
    let morph = load_morphology(args.exceptions.as_deref().or(config.exceptions.as_deref()))?;
    let trees = load_corpus(&args.corpus)?;
    let result = extract::accumulate(&trees, &morph, PairMultiplicity::Sentence)
        .map_err(morph_error)?;
    print!("{}", render_freq(&result, top));
    Ok(())
}

fn cmd_extract(args: ExtractArgs) -> Result<(), CliError> {
    let config = FileConfig::load(args.common.config.as_deref())?;
    let multiplicity: PairMultiplicity = args
        .pair_multiplicity
        .or(config.pair_multiplicity)
        .unwrap_or(MultiplicityArg::Sentence)
        .into();
    let out = args.common.out.or(config.out).unwrap_or_else(|| PathBuf::from("."));
    let morph = load_morphology(args.exceptions.as_deref().or(config.exceptions.as_deref()))?;
    let trees = load_corpus(&args.corpus)?;
    let result = extract::accumulate(&trees, &morph, multiplicity).map_err(morph_error)?;
    write_output(&out, "counts.tsv", &extract::render_counts(&result.cooc, &result.compounds))
}

/// Effective `run` settings after merging flags, config file, and
/// defaults.
#[derive(Debug)]
struct RunSettings {
    seeds: PathBuf,
    iterations: usize,
    cutoff: f64,
    min_occurrence: u64,
    multiplicity: PairMultiplicity,
    out: PathBuf,
    exceptions: Option<PathBuf>,
}

fn resolve_run(args: &RunArgs) -> Result<RunSettings, CliError> {
    let config = FileConfig::load(args.common.config.as_deref())?;
    let seeds = args
        .seeds
        .clone()
        .or(config.seeds)
        .ok_or_else(|| CliError::Usage("--seeds is required (flag or config file)".into()))?;
    let iterations = args.iterations.or(config.iterations).unwrap_or(50);
    if iterations == 0 {
        return Err(CliError::Usage("--iterations must be at least 1".into()));
    }
    let cutoff = args.cutoff.or(config.cutoff).unwrap_or(0.25);
    if !(0.0..=1.0).contains(&cutoff) {
        return Err(CliError::Usage(format!("--cutoff must be in [0,1], got {cutoff}")));
    }
    let min_occurrence = args.min_occurrence.or(config.min_occurrence).unwrap_or(1);
    if min_occurrence == 0 {
        return Err(CliError::Usage("--min-occurrence must be at least 1".into()));
    }
    Ok(RunSettings {
        seeds,
        iterations,
        cutoff,
        min_occurrence,
        multiplicity: args
            .pair_multiplicity
            .or(config.pair_multiplicity)
            .unwrap_or(MultiplicityArg::Sentence)
            .into(),
        out: args.common.out.clone().or(config.out).unwrap_or_else(|| PathBuf::from(".")),
        exceptions: args.exceptions.clone().or(config.exceptions),
    })
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let settings = resolve_run(&args)?;
    let morph = load_morphology(settings.exceptions.as_deref())?;
    let seed_text = read_input(&settings.seeds)?;
    let seed_entries: Vec<SeedEntry> =
        crate::morph::parse_seed_file(&seed_text, &settings.seeds.display().to_string())
            .map_err(morph_error)?;
    if seed_entries.is_empty() {
        return Err(CliError::Usage(format!(
            "seed file {} lists no lemmas",
            settings.seeds.display()
        )));
    }
    let trees = load_corpus(&args.corpus)?;
    let mut result =
        extract::accumulate(&trees, &morph, settings.multiplicity).map_err(morph_error)?;
    let mut seed_set = BTreeSet::new();
    for entry in &seed_entries {
        result.lexicon.observe_seed(entry);
        seed_set.insert(entry.key.clone());
    }

    let outcome = bootstrap::bootstrap(
        &result.cooc,
        &seed_set,
        &BootstrapConfig {
            iterations: settings.iterations,
            min_occurrence: settings.min_occurrence,
        },
    )
    .map_err(|err| match err {
        BootstrapError::NoUsableSeeds => CliError::Usage(err.to_string()),
        BootstrapError::Stats(_) => CliError::Internal(err.to_string()),
    })?;
    for ignored in &outcome.ignored_seeds {
        eprintln!("warning: seed {ignored:?} does not occur in the corpus; ignoring");
    }

    let compounds = compound::emit_compound_list(
        &outcome.entries,
        &result.occurrences,
        &result.compounds,
        settings.cutoff,
    )
    .map_err(|err| CliError::Internal(err.to_string()))?;

    let heads_text = render_heads(&outcome.entries, &result.lexicon);
    let compounds_text = render_compounds(&compounds, &result.lexicon);
    let report_text = render_report(
        trees.len(),
        &settings,
        &outcome,
        &result.lexicon,
        result.occurrences.len(),
        compounds.len(),
    );
    write_output(&settings.out, "heads.tsv", &heads_text)?;
    write_output(&settings.out, "compounds.tsv", &compounds_text)?;
    write_output(&settings.out, "report.txt", &report_text)
}

fn cmd_synth(args: SynthArgs) -> Result<(), CliError> {
    let config = FileConfig::load(args.common.config.as_deref())?;
    let rng_seed = args.rng_seed.or(config.rng_seed).unwrap_or(0);
    let out = args.common.out.or(config.out).unwrap_or_else(|| PathBuf::from("."));
    let spec_text = read_input(&args.spec)?;
    let spec = synth::parse_spec(&spec_text)
        .map_err(|err| CliError::Usage(format!("{}: {err}", args.spec.display())))?;
    write_output(&out, "synth.mrg", &synth::generate(&spec, rng_seed))
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Freq(args) => cmd_freq(args),
        Command::Extract(args) => cmd_extract(args),
        Command::Run(args) => cmd_run(args),
        Command::Synth(args) => cmd_synth(args),
    }
}

/// Binary entry point. Usage errors exit 1, input parse errors 2,
/// internal invariant violations 3.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = u8::from(err.use_stderr());
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
