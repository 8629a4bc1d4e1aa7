//! Orchestration: config, stage registry, reporting, and the runner.

mod config;
mod report;
mod run;
mod stage;

pub use config::{PipelineConfig, SourceSpec};
pub use report::{ReportRow, StageReport};
pub use run::{run_pipeline, select_stages, RunSummary};
pub use stage::{build_stage_report, stage_named, stage_registry, PipelineStage, StageContext};
