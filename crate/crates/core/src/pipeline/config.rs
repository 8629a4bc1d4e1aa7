//! Pipeline configuration: sources, output layout, and per-stage knobs.

use crate::doc::UnitMode;
use crate::error::{Error, Result};
use crate::filter::{FilterConfig, SourceInput};
use crate::minhash::MinHashParams;
use crate::overlap::CountMode;
use crate::sentdedup::SpanParams;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    pub name: String,
    pub pattern: String,
    /// Representative selection rank; the lowest number wins a cluster.
    pub priority: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub sources: Vec<SourceSpec>,
    pub output_root: PathBuf,
    /// "words", or the name of a record field carrying external counts.
    pub unit: UnitMode,
    /// Whether overlap analytics count documents or units.
    pub overlap_mode: CountMode,
    pub gzip_output: bool,
    /// Defaults to `<output_root>/report`.
    pub report_dir: Option<PathBuf>,
    pub filter: FilterConfig,
    pub minhash: MinHashParams,
    pub sentdedup: SpanParams,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            sources: Vec::new(),
            output_root: PathBuf::from("out"),
            unit: UnitMode::Words,
            overlap_mode: CountMode::Units,
            gzip_output: false,
            report_dir: None,
            filter: FilterConfig::default(),
            minhash: MinHashParams::default(),
            sentdedup: SpanParams::default(),
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<PipelineConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text)
            .map_err(|e| Error::config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        if self.sources.is_empty() {
            return Err(Error::config("at least one [[sources]] entry is required"));
        }
        let mut names = HashSet::new();
        let mut priorities = HashSet::new();
        for spec in &self.sources {
            if spec.name.is_empty()
                || spec.name == "TOTAL"
                || spec.name.contains(['/', '\\'])
                || spec.name.chars().any(char::is_whitespace)
            {
                return Err(Error::config(format!(
                    "source name `{}` is not usable (empty, reserved, or contains separators)",
                    spec.name
                )));
            }
            if !names.insert(spec.name.as_str()) {
                return Err(Error::config(format!("duplicate source name `{}`", spec.name)));
            }
            if !priorities.insert(spec.priority) {
                return Err(Error::config(format!(
                    "duplicate priority {} (priorities must be a total order)",
                    spec.priority
                )));
            }
        }
        self.filter.validate()?;
        self.minhash.validate()?;
        self.sentdedup.validate()?;
        Ok(())
    }

    /// Source names ordered by rank, best first.
    pub fn priority_order(&self) -> Vec<String> {
        let mut specs: Vec<&SourceSpec> = self.sources.iter().collect();
        specs.sort_by_key(|s| s.priority);
        specs.iter().map(|s| s.name.clone()).collect()
    }

    /// Raw inputs for the filter stage, in config order.
    pub fn source_inputs(&self) -> Vec<SourceInput> {
        self.sources
            .iter()
            .map(|s| SourceInput {
                name: s.name.clone(),
                pattern: s.pattern.clone(),
            })
            .collect()
    }

    fn stage_inputs(&self, dir: &Path) -> Vec<SourceInput> {
        self.sources
            .iter()
            .map(|s| SourceInput {
                name: s.name.clone(),
                pattern: format!("{}/{}-*.jsonl*", dir.display(), s.name),
            })
            .collect()
    }

    /// Filter-stage outputs as minhash-stage inputs.
    pub fn filtered_inputs(&self) -> Vec<SourceInput> {
        self.stage_inputs(&self.filtered_dir())
    }

    /// Minhash-stage kept shards as sentdedup-stage inputs.
    pub fn deduped_inputs(&self) -> Vec<SourceInput> {
        self.stage_inputs(&self.deduped_dir())
    }

    pub fn filtered_dir(&self) -> PathBuf {
        self.output_root.join("filtered")
    }

    pub fn deduped_dir(&self) -> PathBuf {
        self.output_root.join("deduped")
    }

    pub fn final_dir(&self) -> PathBuf {
        self.output_root.join("final")
    }

    pub fn store_path(&self) -> PathBuf {
        self.output_root.join("spans.store")
    }

    pub fn report_dir(&self) -> PathBuf {
        self.report_dir
            .clone()
            .unwrap_or_else(|| self.output_root.join("report"))
    }

    pub fn stats_path(&self, stage: &str) -> PathBuf {
        self.output_root.join(format!("{stage}_stats.json"))
    }

    pub fn manifest_path(&self, stage: &str) -> PathBuf {
        self.output_root.join(format!("{stage}_manifest.json"))
    }
}
