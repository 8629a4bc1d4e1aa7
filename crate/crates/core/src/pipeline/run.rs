//! End-to-end orchestration with stage-level barriers.

use super::config::PipelineConfig;
use super::report::StageReport;
use super::stage::{build_stage_report, stage_named, stage_registry, PipelineStage, StageContext};
use crate::error::{Error, Result};
use std::collections::HashSet;

#[derive(Debug)]
pub struct RunSummary {
    pub stages_run: Vec<&'static str>,
    pub report: StageReport,
}

/// Resolve a stage-name selection against the registry. Execution order is
/// always canonical regardless of how the selection is spelled.
pub fn select_stages(names: Option<&[String]>) -> Result<Vec<&'static dyn PipelineStage>> {
    let Some(names) = names else {
        return Ok(stage_registry().to_vec());
    };
    let mut wanted: HashSet<&str> = HashSet::new();
    for name in names {
        if stage_named(name).is_none() {
            let known: Vec<&str> = stage_registry().iter().map(|s| s.name()).collect();
            return Err(Error::config(format!(
                "unknown stage `{name}` (known stages: {})",
                known.join(", ")
            )));
        }
        wanted.insert(name.as_str());
    }
    Ok(stage_registry()
        .iter()
        .copied()
        .filter(|s| wanted.contains(s.name()))
        .collect())
}

/// Run the selected stages in canonical order. A failing stage has its
/// outputs removed and the error comes back tagged with the stage name.
/// The returned report reflects every stats file present under the output
/// root, whether written by this run or an earlier one.
pub fn run_pipeline(
    config: &PipelineConfig,
    seed: Option<u64>,
    stages: Option<&[String]>,
) -> Result<RunSummary> {
    config.validate()?;
    let mut cfg = config.clone();
    if let Some(seed) = seed {
        cfg.minhash.seed = seed;
    }
    let selected = select_stages(stages)?;
    std::fs::create_dir_all(&cfg.output_root).map_err(|e| Error::io(&cfg.output_root, e))?;

    let ctx = StageContext { config: &cfg };
    let mut stages_run = Vec::new();
    for stage in selected {
        if let Err(e) = stage.run(&ctx) {
            for path in stage.outputs(&ctx) {
                if path.is_dir() {
                    let _ = std::fs::remove_dir_all(&path);
                } else {
                    let _ = std::fs::remove_file(&path);
                }
            }
            return Err(e.in_stage(stage.name()));
        }
        stages_run.push(stage.name());
    }
    let report = build_stage_report(&cfg)?;
    Ok(RunSummary { stages_run, report })
}
