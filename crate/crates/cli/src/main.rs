//! Command line front end: the full pipeline plus each stage standalone.
//!
//! Exit codes: 0 success, 1 usage or config error, 2 data error, 3 I/O
//! error.

use clap::{Args, Parser, Subcommand};
use ghirbal_core::filter::{run_filter_stage, FilterConfig, SourceInput};
use ghirbal_core::minhash::{run_minhash_stage, MinHashParams, ShingleMode};
use ghirbal_core::overlap::CountMode;
use ghirbal_core::pipeline::{run_pipeline, stage_named, PipelineConfig, StageContext};
use ghirbal_core::sentdedup::{run_sentdedup_stage, Phase, SpanParams};
use ghirbal_core::{Error, Result, UnitMode};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ghirbal", version, about = "Arabic web-corpus curation pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured stages end to end
    Pipeline(PipelineArgs),
    /// Quality-filter shards (line scrubbing + document checks)
    Filter(FilterArgs),
    /// Near-duplicate detection and removal across sources
    Minhash(MinhashArgs),
    /// Sentence-span boilerplate removal
    Sentdedup(SentDedupArgs),
    /// Recompute overlap analytics and reports from a pipeline output root
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
struct PipelineArgs {
    /// Pipeline configuration (TOML)
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Override the configured MinHash seed
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Subset of stages to run; execution order stays canonical
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    stages: Option<Vec<String>>,
}

/// `NAME=GLOB` pairs for the standalone stage subcommands.
fn parse_source(s: &str) -> std::result::Result<SourceInput, String> {
    let (name, pattern) = s
        .split_once('=')
        .ok_or_else(|| format!("`{s}` is not NAME=GLOB"))?;
    if name.is_empty() || pattern.is_empty() {
        return Err(format!("`{s}` is not NAME=GLOB"));
    }
    Ok(SourceInput {
        name: name.to_string(),
        pattern: pattern.to_string(),
    })
}

#[derive(Args)]
struct FilterArgs {
    /// Input corpus as NAME=GLOB; repeatable
    #[arg(long = "input", value_parser = parse_source, required = true, value_name = "NAME=GLOB")]
    inputs: Vec<SourceInput>,
    /// Directory for kept shards, stats, and manifest
    #[arg(long, value_name = "DIR")]
    output: PathBuf,
    /// TOML file with any FilterConfig fields; flags below override it
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Unit accounting: "words" or a numeric passthrough field name
    #[arg(long, value_name = "MODE", default_value = "words")]
    units: UnitMode,
    /// Gzip output shards
    #[arg(long)]
    gzip: bool,
    #[command(flatten)]
    overrides: FilterOverrides,
}

/// One flag per FilterConfig field; unset flags keep the file/default value.
#[derive(Args)]
struct FilterOverrides {
    #[arg(long, value_name = "RATIO")]
    min_terminal_punct_ratio: Option<f64>,
    #[arg(long, value_name = "BOOL")]
    allow_zero_punct: Option<bool>,
    #[arg(long, value_name = "RATIO")]
    max_char_dup_ratio: Option<f64>,
    #[arg(long, value_name = "RATIO")]
    max_short_line_ratio: Option<f64>,
    #[arg(long, value_name = "N")]
    short_line_max_chars: Option<u64>,
    #[arg(long, value_name = "RATIO")]
    max_newlines_per_word: Option<f64>,
    #[arg(long, value_name = "N")]
    min_chars: Option<u64>,
    #[arg(long, value_name = "N")]
    min_words: Option<u64>,
    #[arg(long, value_name = "RATIO")]
    min_arabic_alpha_ratio: Option<f64>,
    #[arg(long, value_name = "BOOL")]
    reject_curly: Option<bool>,
    #[arg(long, value_name = "N")]
    max_word_chars: Option<u64>,
    #[arg(long, value_name = "RATIO")]
    max_bullet_line_ratio: Option<f64>,
    #[arg(long, value_name = "N")]
    max_char_run: Option<u64>,
    /// Replaces the whole phrase list when given; repeatable
    #[arg(long = "policy-phrase", value_name = "TEXT")]
    policy_phrases: Vec<String>,
    #[arg(long, value_name = "CHARS")]
    terminal_punct: Option<String>,
}

impl FilterOverrides {
    fn apply(&self, cfg: &mut FilterConfig) {
        macro_rules! take {
            ($($field:ident),+) => {
                $(if let Some(v) = self.$field.clone() { cfg.$field = v; })+
            };
        }
        take!(
            min_terminal_punct_ratio,
            allow_zero_punct,
            max_char_dup_ratio,
            max_short_line_ratio,
            short_line_max_chars,
            max_newlines_per_word,
            min_chars,
            min_words,
            min_arabic_alpha_ratio,
            reject_curly,
            max_word_chars,
            max_bullet_line_ratio,
            max_char_run,
            terminal_punct
        );
        if !self.policy_phrases.is_empty() {
            cfg.policy_phrases = self.policy_phrases.clone();
        }
    }
}

#[derive(Args)]
struct MinhashArgs {
    /// Input corpus as NAME=GLOB; repeatable
    #[arg(long = "input", value_parser = parse_source, required = true, value_name = "NAME=GLOB")]
    inputs: Vec<SourceInput>,
    /// Directory for kept shards, signatures, consensus, and clusters
    #[arg(long, value_name = "DIR")]
    output: PathBuf,
    #[arg(long, value_name = "N", default_value_t = 0)]
    seed: u64,
    #[arg(long, value_name = "N", default_value_t = 14)]
    bands: usize,
    #[arg(long, value_name = "N", default_value_t = 8)]
    rows: usize,
    /// Shingle length (characters, or words with --shingle-mode words)
    #[arg(long, value_name = "N", default_value_t = 5)]
    shingle: usize,
    #[arg(long, value_name = "MODE", default_value = "chars")]
    shingle_mode: CliShingleMode,
    /// Source precedence for representative selection; defaults to --input order
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    priority: Option<Vec<String>>,
    /// Band buckets above this size are unioned without pair expansion
    #[arg(long, value_name = "N", default_value_t = 10_000)]
    max_bucket_pairwise: usize,
    /// Unit accounting: "words" or a numeric passthrough field name
    #[arg(long, value_name = "MODE", default_value = "words")]
    units: UnitMode,
    /// Gzip output shards
    #[arg(long)]
    gzip: bool,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum CliShingleMode {
    Chars,
    Words,
}

impl From<CliShingleMode> for ShingleMode {
    fn from(m: CliShingleMode) -> ShingleMode {
        match m {
            CliShingleMode::Chars => ShingleMode::Chars,
            CliShingleMode::Words => ShingleMode::Words,
        }
    }
}

#[derive(Args)]
struct SentDedupArgs {
    /// Input corpus as NAME=GLOB; repeatable
    #[arg(long = "input", value_parser = parse_source, required = true, value_name = "NAME=GLOB")]
    inputs: Vec<SourceInput>,
    /// Directory for rewritten shards, stats, and manifest
    #[arg(long, value_name = "DIR")]
    output: PathBuf,
    /// Consecutive eligible sentences per span
    #[arg(long, value_name = "N", default_value_t = 3)]
    span: usize,
    /// Sentences below this word count never join a span
    #[arg(long, value_name = "N", default_value_t = 5)]
    min_sentence_words: usize,
    /// Spans occurring at least this often get their sentences removed
    #[arg(long, value_name = "N", default_value_t = 3)]
    threshold: u64,
    /// Documents falling below this word count after removal are dropped
    #[arg(long, value_name = "N", default_value_t = 50)]
    min_doc_words: u64,
    /// Span-count store; persists between the sign and filter phases
    #[arg(long, value_name = "PATH")]
    store: PathBuf,
    /// sign, filter, or both
    #[arg(long, value_name = "PHASE", default_value = "both")]
    phase: Phase,
    /// Unit accounting: "words" or a numeric passthrough field name
    #[arg(long, value_name = "MODE", default_value = "words")]
    units: UnitMode,
    /// Gzip output shards
    #[arg(long)]
    gzip: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// A pipeline run's output root (holds filtered/, deduped/, final/)
    #[arg(long, value_name = "DIR")]
    root: PathBuf,
    /// Where to write the reports; defaults to ROOT/report
    #[arg(long, value_name = "DIR")]
    report_dir: Option<PathBuf>,
    /// Count overlap in "docs" or "units"
    #[arg(long, value_name = "MODE", default_value = "units")]
    mode: CountMode,
    /// Unit label for the report
    #[arg(long, value_name = "MODE", default_value = "words")]
    units: UnitMode,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Pipeline(args) => cmd_pipeline(args),
        Command::Filter(args) => cmd_filter(args),
        Command::Minhash(args) => cmd_minhash(args),
        Command::Sentdedup(args) => cmd_sentdedup(args),
        Command::Analyze(args) => cmd_analyze(args),
    }
}

fn cmd_pipeline(args: PipelineArgs) -> Result<()> {
    let config = PipelineConfig::load(&args.config)?;
    let summary = run_pipeline(&config, args.seed, args.stages.as_deref())?;
    for stage in &summary.stages_run {
        match summary.report.stage_total(stage) {
            Some(total) => println!(
                "{stage}: {} -> {} docs ({:.1}% removed)",
                total.input_docs, total.output_docs, total.reduction_percent
            ),
            None => println!("{stage}: done"),
        }
    }
    if summary.stages_run.iter().any(|s| *s == "analyze") {
        println!("reports in {}", config.report_dir().display());
    }
    Ok(())
}

fn cmd_filter(args: FilterArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            toml::from_str::<FilterConfig>(&text)
                .map_err(|e| Error::config(format!("{}: {e}", path.display())))?
        }
        None => FilterConfig::default(),
    };
    args.overrides.apply(&mut cfg);
    let outcome = run_filter_stage(&args.inputs, &args.output, &cfg, &args.units, args.gzip)?;
    outcome.stats.write(&args.output.join("filter_stats.json"))?;
    outcome.manifest.write(&args.output.join("filter_manifest.json"))?;
    for (source, n) in &outcome.stats.per_source_input {
        let kept = outcome.stats.per_source_output.get(source).copied().unwrap_or(0);
        println!("{source}: kept {kept}/{n} docs");
    }
    Ok(())
}

fn cmd_minhash(args: MinhashArgs) -> Result<()> {
    let params = MinHashParams {
        shingle_len: args.shingle,
        bands: args.bands,
        rows_per_band: args.rows,
        seed: args.seed,
        shingle_mode: args.shingle_mode.into(),
        max_bucket_pairwise: args.max_bucket_pairwise,
    };
    let priority = args
        .priority
        .unwrap_or_else(|| args.inputs.iter().map(|s| s.name.clone()).collect());
    let outcome = run_minhash_stage(
        &args.inputs,
        &args.output,
        &params,
        &priority,
        &args.units,
        args.gzip,
    )?;
    outcome.stats.write(&args.output.join("minhash_stats.json"))?;
    outcome.manifest.write(&args.output.join("minhash_manifest.json"))?;
    println!(
        "{} candidate pairs, {} clusters, {} docs removed",
        outcome.stats.candidate_pairs, outcome.stats.cluster_count, outcome.stats.docs_removed
    );
    Ok(())
}

fn cmd_sentdedup(args: SentDedupArgs) -> Result<()> {
    let params = SpanParams {
        span_size: args.span,
        min_sentence_words: args.min_sentence_words,
        dup_threshold: args.threshold,
        min_doc_words_after: args.min_doc_words,
    };
    let outcome = run_sentdedup_stage(
        &args.inputs,
        &args.output,
        &args.store,
        &params,
        &args.units,
        args.gzip,
        args.phase,
    )?;
    match outcome {
        None => println!("span counts written to {}", args.store.display()),
        Some(outcome) => {
            outcome.stats.write(&args.output.join("sentdedup_stats.json"))?;
            outcome.manifest.write(&args.output.join("sentdedup_manifest.json"))?;
            println!(
                "{} sentences removed, {} docs modified, {} docs discarded",
                outcome.stats.sentences_removed,
                outcome.stats.docs_modified,
                outcome.stats.docs_discarded
            );
        }
    }
    Ok(())
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<()> {
    // analyze never touches raw inputs, so an empty source list is fine
    let config = PipelineConfig {
        sources: Vec::new(),
        output_root: args.root,
        unit: args.units,
        overlap_mode: args.mode,
        report_dir: args.report_dir,
        ..PipelineConfig::default()
    };
    let stage = stage_named("analyze").expect("analyze stage is registered");
    stage.run(&StageContext { config: &config })?;
    println!("reports in {}", config.report_dir().display());
    Ok(())
}
