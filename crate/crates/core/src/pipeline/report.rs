//! Stage-by-stage accounting rendered as JSON, CSV, and markdown.

use crate::error::{Error, Result};
use crate::overlap::{DepthHistogram, SurvivalTable};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReportRow {
    pub stage: String,
    pub source: String,
    pub input_docs: u64,
    pub output_docs: u64,
    pub input_units: u64,
    pub output_units: u64,
    /// Document reduction for this row, in percent of input.
    pub reduction_percent: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct StageReport {
    pub unit_label: String,
    pub rows: Vec<ReportRow>,
}

fn reduction(input: u64, output: u64) -> f64 {
    if input == 0 {
        0.0
    } else {
        (input - output) as f64 / input as f64 * 100.0
    }
}

impl StageReport {
    pub fn new(unit_label: &str) -> Self {
        StageReport {
            unit_label: unit_label.to_string(),
            rows: Vec::new(),
        }
    }

    /// Append one stage's per-source rows plus its TOTAL row. Sources are
    /// the union of the four maps, in sorted order.
    pub fn push_stage(
        &mut self,
        stage: &str,
        input_docs: &BTreeMap<String, u64>,
        output_docs: &BTreeMap<String, u64>,
        input_units: &BTreeMap<String, u64>,
        output_units: &BTreeMap<String, u64>,
    ) {
        let mut sources: Vec<&String> = input_docs
            .keys()
            .chain(output_docs.keys())
            .chain(input_units.keys())
            .chain(output_units.keys())
            .collect();
        sources.sort();
        sources.dedup();
        let mut totals = (0u64, 0u64, 0u64, 0u64);
        for source in sources {
            let row = ReportRow {
                stage: stage.to_string(),
                source: source.clone(),
                input_docs: input_docs.get(source).copied().unwrap_or(0),
                output_docs: output_docs.get(source).copied().unwrap_or(0),
                input_units: input_units.get(source).copied().unwrap_or(0),
                output_units: output_units.get(source).copied().unwrap_or(0),
                reduction_percent: 0.0,
            };
            totals.0 += row.input_docs;
            totals.1 += row.output_docs;
            totals.2 += row.input_units;
            totals.3 += row.output_units;
            self.rows.push(ReportRow {
                reduction_percent: reduction(row.input_docs, row.output_docs),
                ..row
            });
        }
        self.rows.push(ReportRow {
            stage: stage.to_string(),
            source: "TOTAL".to_string(),
            input_docs: totals.0,
            output_docs: totals.1,
            input_units: totals.2,
            output_units: totals.3,
            reduction_percent: reduction(totals.0, totals.1),
        });
    }

    pub fn stage_total(&self, stage: &str) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.stage == stage && r.source == "TOTAL")
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::data(format!("report serialization: {e}")))
    }

    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("stage,source,input_docs,output_docs,input_units,output_units,reduction_percent\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{:.4}",
                r.stage, r.source, r.input_docs, r.output_docs, r.input_units, r.output_units,
                r.reduction_percent
            );
        }
        out
    }

    /// Human-readable report: stage accounting plus the duplicate-depth
    /// and survival tables when analytics ran.
    pub fn to_markdown(
        &self,
        histogram: Option<&DepthHistogram>,
        survival: Option<&SurvivalTable>,
    ) -> String {
        let unit = &self.unit_label;
        let mut out = String::from("# Corpus curation report\n\n");
        let _ = writeln!(out, "Count unit: {unit}\n");
        out.push_str("## Stage accounting\n\n");
        let _ = writeln!(
            out,
            "| stage | source | input docs | output docs | input {unit} | output {unit} | reduction % |"
        );
        out.push_str("|---|---|---:|---:|---:|---:|---:|\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} | {:.1} |",
                r.stage, r.source, r.input_docs, r.output_docs, r.input_units, r.output_units,
                r.reduction_percent
            );
        }
        if let Some(h) = histogram {
            out.push_str("\n## Duplicate clusters by source depth\n\n");
            let _ = writeln!(out, "| sources | clusters | removed {unit} | % of removed |");
            out.push_str("|---:|---:|---:|---:|\n");
            for row in &h.rows {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {:.1} |",
                    row.depth, row.clusters, row.units, row.percent
                );
            }
        }
        if let Some(s) = survival {
            out.push_str("\n## Document survival through near-duplicate removal\n\n");
            out.push_str("| source | before | after | survival % |\n");
            out.push_str("|---|---:|---:|---:|\n");
            for row in &s.rows {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {:.1} |",
                    row.source, row.before, row.after, row.survival * 100.0
                );
            }
        }
        out
    }
}
