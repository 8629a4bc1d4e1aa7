//! The stage registry: each pipeline stage behind one trait, selected by
//! name at runtime, always executed in canonical order.

use super::config::PipelineConfig;
use super::report::StageReport;
use crate::error::{Error, Result};
use crate::filter::{run_filter_stage, FilterStats};
use crate::minhash::{read_consensus, run_minhash_stage, MinhashStats};
use crate::overlap::{depth_histogram, pairwise_overlap, survival_rates, CountMode};
use crate::sentdedup::{run_sentdedup_stage, Phase, SentDedupStats};
use std::path::PathBuf;

pub struct StageContext<'a> {
    pub config: &'a PipelineConfig,
}

/// One pipeline stage. Implementations read their inputs from the layout
/// under `output_root` and persist both data and stats there, so any
/// stage can be re-run standalone against a previous run's directory.
pub trait PipelineStage: Sync {
    fn name(&self) -> &'static str;
    fn run(&self, ctx: &StageContext) -> Result<()>;
    /// Everything the stage creates; removed when the stage fails so a
    /// partial run never masquerades as a finished one.
    fn outputs(&self, ctx: &StageContext) -> Vec<PathBuf>;
}

struct FilterStage;

impl PipelineStage for FilterStage {
    fn name(&self) -> &'static str {
        "filter"
    }

    fn run(&self, ctx: &StageContext) -> Result<()> {
        let cfg = ctx.config;
        let outcome = run_filter_stage(
            &cfg.source_inputs(),
            &cfg.filtered_dir(),
            &cfg.filter,
            &cfg.unit,
            cfg.gzip_output,
        )?;
        outcome.stats.write(&cfg.stats_path("filter"))?;
        outcome.manifest.write(&cfg.manifest_path("filter"))
    }

    fn outputs(&self, ctx: &StageContext) -> Vec<PathBuf> {
        vec![
            ctx.config.filtered_dir(),
            ctx.config.stats_path("filter"),
            ctx.config.manifest_path("filter"),
        ]
    }
}

struct MinhashStage;

impl PipelineStage for MinhashStage {
    fn name(&self) -> &'static str {
        "minhash"
    }

    fn run(&self, ctx: &StageContext) -> Result<()> {
        let cfg = ctx.config;
        let outcome = run_minhash_stage(
            &cfg.filtered_inputs(),
            &cfg.deduped_dir(),
            &cfg.minhash,
            &cfg.priority_order(),
            &cfg.unit,
            cfg.gzip_output,
        )?;
        outcome.stats.write(&cfg.stats_path("minhash"))?;
        outcome.manifest.write(&cfg.manifest_path("minhash"))
    }

    fn outputs(&self, ctx: &StageContext) -> Vec<PathBuf> {
        vec![
            ctx.config.deduped_dir(),
            ctx.config.stats_path("minhash"),
            ctx.config.manifest_path("minhash"),
        ]
    }
}

struct SentDedupStage;

impl PipelineStage for SentDedupStage {
    fn name(&self) -> &'static str {
        "sentdedup"
    }

    fn run(&self, ctx: &StageContext) -> Result<()> {
        let cfg = ctx.config;
        let outcome = run_sentdedup_stage(
            &cfg.deduped_inputs(),
            &cfg.final_dir(),
            &cfg.store_path(),
            &cfg.sentdedup,
            &cfg.unit,
            cfg.gzip_output,
            Phase::Both,
        )?
        .expect("phase Both always yields an outcome");
        outcome.stats.write(&cfg.stats_path("sentdedup"))?;
        outcome.manifest.write(&cfg.manifest_path("sentdedup"))
    }

    fn outputs(&self, ctx: &StageContext) -> Vec<PathBuf> {
        vec![
            ctx.config.final_dir(),
            ctx.config.store_path(),
            ctx.config.stats_path("sentdedup"),
            ctx.config.manifest_path("sentdedup"),
        ]
    }
}

struct AnalyzeStage;

impl PipelineStage for AnalyzeStage {
    fn name(&self) -> &'static str {
        "analyze"
    }

    fn run(&self, ctx: &StageContext) -> Result<()> {
        let cfg = ctx.config;
        let consensus = read_consensus(&cfg.deduped_dir().join("consensus.jsonl"))?;
        let mstats = MinhashStats::read(&cfg.stats_path("minhash"))?;
        let mode = cfg.overlap_mode;
        let totals = match mode {
            CountMode::Docs => &mstats.per_source_input_docs,
            CountMode::Units => &mstats.per_source_input_units,
        };
        let matrix = pairwise_overlap(&consensus, totals, mode)?;
        let histogram = depth_histogram(&consensus, mode);
        let survival = survival_rates(
            &mstats.per_source_input_docs,
            &mstats.per_source_output_docs,
        )?;
        let report = build_stage_report(cfg)?;

        let dir = cfg.report_dir();
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let write = |name: &str, contents: String| -> Result<()> {
            let path = dir.join(name);
            std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))
        };
        write("overlap_matrix.csv", matrix.to_csv(false))?;
        write("overlap_matrix_normalized.csv", matrix.to_csv(true))?;
        write(
            "depth_histogram.json",
            serde_json::to_string_pretty(&histogram)
                .map_err(|e| Error::data(format!("histogram serialization: {e}")))?,
        )?;
        write(
            "survival.json",
            serde_json::to_string_pretty(&survival)
                .map_err(|e| Error::data(format!("survival serialization: {e}")))?,
        )?;
        write("report.json", report.to_json()?)?;
        write("report.csv", report.to_csv())?;
        write("report.md", report.to_markdown(Some(&histogram), Some(&survival)))
    }

    fn outputs(&self, ctx: &StageContext) -> Vec<PathBuf> {
        vec![ctx.config.report_dir()]
    }
}

static STAGES: [&dyn PipelineStage; 4] =
    [&FilterStage, &MinhashStage, &SentDedupStage, &AnalyzeStage];

/// All stages in canonical execution order.
pub fn stage_registry() -> &'static [&'static dyn PipelineStage] {
    &STAGES
}

pub fn stage_named(name: &str) -> Option<&'static dyn PipelineStage> {
    STAGES.iter().copied().find(|s| s.name() == name)
}

/// Assemble the accounting table from whichever stage stats have been
/// persisted. Reading only persisted files keeps resumed runs and fresh
/// runs byte-identical.
pub fn build_stage_report(config: &PipelineConfig) -> Result<StageReport> {
    let mut report = StageReport::new(config.unit.label());
    let filter_path = config.stats_path("filter");
    if filter_path.exists() {
        let s = FilterStats::read(&filter_path)?;
        report.push_stage(
            "filter",
            &s.per_source_input,
            &s.per_source_output,
            &s.per_source_input_units,
            &s.per_source_output_units,
        );
    }
    let minhash_path = config.stats_path("minhash");
    if minhash_path.exists() {
        let s = MinhashStats::read(&minhash_path)?;
        report.push_stage(
            "minhash",
            &s.per_source_input_docs,
            &s.per_source_output_docs,
            &s.per_source_input_units,
            &s.per_source_output_units,
        );
    }
    let sent_path = config.stats_path("sentdedup");
    if sent_path.exists() {
        let s = SentDedupStats::read(&sent_path)?;
        report.push_stage(
            "sentdedup",
            &s.per_source_input_docs,
            &s.per_source_output_docs,
            &s.per_source_input_units,
            &s.per_source_output_units,
        );
    }
    Ok(report)
}
