//! Quality-filtering stage: scrub lines, judge documents, keep the tallies.

use super::checks::{evaluate_document, Reason};
use super::config::FilterConfig;
use super::lines::LineFilter;
use crate::doc::{Document, UnitMode};
use crate::error::Result;
use crate::io::{read_shard_file, write_shard, ShardManifest};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// One input corpus: a source name and the glob for its shards.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SourceInput {
    pub name: String,
    pub pattern: String,
}

/// Removal accounting in the shape of the per-filter and per-source
/// drop-rate tables.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct FilterStats {
    pub per_source_input: BTreeMap<String, u64>,
    pub per_source_output: BTreeMap<String, u64>,
    /// Units as read, before line scrubbing.
    pub per_source_input_units: BTreeMap<String, u64>,
    /// Units of kept documents, after line scrubbing.
    pub per_source_output_units: BTreeMap<String, u64>,
    /// reason label -> documents removed, across all sources
    pub reason_tallies: BTreeMap<String, u64>,
    /// source -> reason label -> documents removed
    pub per_source_reasons: BTreeMap<String, BTreeMap<String, u64>>,
    pub removed_lines: u64,
    pub malformed_records: u64,
}

impl FilterStats {
    pub fn record(
        &mut self,
        source: &str,
        verdict_reason: Option<Reason>,
        input_units: u64,
        kept_units: u64,
    ) {
        *self.per_source_input.entry(source.to_string()).or_insert(0) += 1;
        *self
            .per_source_input_units
            .entry(source.to_string())
            .or_insert(0) += input_units;
        match verdict_reason {
            None => {
                *self
                    .per_source_output
                    .entry(source.to_string())
                    .or_insert(0) += 1;
                *self
                    .per_source_output_units
                    .entry(source.to_string())
                    .or_insert(0) += kept_units;
            }
            Some(reason) => {
                *self
                    .reason_tallies
                    .entry(reason.label().to_string())
                    .or_insert(0) += 1;
                *self
                    .per_source_reasons
                    .entry(source.to_string())
                    .or_default()
                    .entry(reason.label().to_string())
                    .or_insert(0) += 1;
            }
        }
    }

    pub fn merge(&mut self, other: FilterStats) {
        for (k, v) in other.per_source_input {
            *self.per_source_input.entry(k).or_insert(0) += v;
        }
        for (k, v) in other.per_source_output {
            *self.per_source_output.entry(k).or_insert(0) += v;
        }
        for (k, v) in other.per_source_input_units {
            *self.per_source_input_units.entry(k).or_insert(0) += v;
        }
        for (k, v) in other.per_source_output_units {
            *self.per_source_output_units.entry(k).or_insert(0) += v;
        }
        for (k, v) in other.reason_tallies {
            *self.reason_tallies.entry(k).or_insert(0) += v;
        }
        for (src, reasons) in other.per_source_reasons {
            let entry = self.per_source_reasons.entry(src).or_default();
            for (k, v) in reasons {
                *entry.entry(k).or_insert(0) += v;
            }
        }
        self.removed_lines += other.removed_lines;
        self.malformed_records += other.malformed_records;
    }

    pub fn total_input(&self) -> u64 {
        self.per_source_input.values().sum()
    }

    pub fn total_output(&self) -> u64 {
        self.per_source_output.values().sum()
    }

    pub fn total_removed(&self) -> u64 {
        self.reason_tallies.values().sum()
    }

    /// Fraction of a source's input that was dropped.
    pub fn drop_rate(&self, source: &str) -> f64 {
        let input = self.per_source_input.get(source).copied().unwrap_or(0);
        if input == 0 {
            return 0.0;
        }
        let output = self.per_source_output.get(source).copied().unwrap_or(0);
        (input - output) as f64 / input as f64
    }

    /// The reason removing the most documents from a source, if any.
    pub fn primary_cause(&self, source: &str) -> Option<&str> {
        self.per_source_reasons.get(source).and_then(|reasons| {
            reasons
                .iter()
                .max_by_key(|(label, n)| (**n, std::cmp::Reverse(label.as_str())))
                .map(|(label, _)| label.as_str())
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| crate::error::Error::data(format!("stats serialization: {e}")))?;
        std::fs::write(path, json).map_err(|e| crate::error::Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<FilterStats> {
        let bytes = std::fs::read(path).map_err(|e| crate::error::Error::io(path, e))?;
        serde_json::from_slice(&bytes)
            .map_err(|e| crate::error::Error::data(format!("{}: bad stats: {e}", path.display())))
    }
}

/// Scrub and judge one document. Returns the scrubbed document (kept or
/// not), its verdict reason, and the removed-line count.
pub fn filter_document(
    doc: &Document,
    line_filter: &LineFilter,
    cfg: &FilterConfig,
) -> (Document, Option<Reason>, u64) {
    let (text, removed_lines) = line_filter.scrub(&doc.text);
    let mut scrubbed = doc.clone();
    if removed_lines > 0 {
        scrubbed.set_text(text);
    }
    let verdict = evaluate_document(&scrubbed, cfg);
    (scrubbed, verdict.reason, removed_lines)
}

#[derive(Debug)]
pub struct FilterOutcome {
    pub manifest: ShardManifest,
    pub stats: FilterStats,
}

/// Run the filter stage over every source. Each input shard maps to one
/// output shard under `out_dir`, named `<source>-<index>.jsonl[.gz]`.
pub fn run_filter_stage(
    sources: &[SourceInput],
    out_dir: &Path,
    cfg: &FilterConfig,
    units: &UnitMode,
    gzip: bool,
) -> Result<FilterOutcome> {
    cfg.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|e| crate::error::Error::io(out_dir, e))?;
    let line_filter = LineFilter::new(cfg);

    // (source, shard path, shard index) work items; shards are independent
    let mut work: Vec<(String, PathBuf, usize)> = Vec::new();
    for source in sources {
        let paths = crate::io::expand_pattern(&source.pattern)?;
        if paths.is_empty() {
            return Err(crate::error::Error::config(format!(
                "source `{}`: no shards match pattern `{}`",
                source.name, source.pattern
            )));
        }
        for (idx, path) in paths.into_iter().enumerate() {
            work.push((source.name.clone(), path, idx));
        }
    }

    let results: Vec<Result<(ShardManifest, FilterStats)>> = work
        .par_iter()
        .map(|(source, path, shard_idx)| {
            let read = read_shard_file(path, source, *shard_idx)?;
            let mut stats = FilterStats {
                malformed_records: read.malformed,
                ..FilterStats::default()
            };
            let mut kept: Vec<Document> = Vec::with_capacity(read.docs.len());
            for doc in &read.docs {
                let (scrubbed, reason, removed_lines) = filter_document(doc, &line_filter, cfg);
                stats.removed_lines += removed_lines;
                stats.record(
                    &scrubbed.source,
                    reason,
                    units.units_of(doc),
                    units.units_of(&scrubbed),
                );
                if reason.is_none() {
                    kept.push(scrubbed);
                }
            }
            let ext = if gzip { "jsonl.gz" } else { "jsonl" };
            let out_path = out_dir.join(format!("{source}-{shard_idx:04}.{ext}"));
            let entry = write_shard(kept.iter(), &out_path, units)?;
            let mut manifest = ShardManifest::default();
            manifest.add_shard(entry);
            Ok((manifest, stats))
        })
        .collect();

    let mut outcome = FilterOutcome {
        manifest: ShardManifest::default(),
        stats: FilterStats::default(),
    };
    for result in results {
        let (manifest, stats) = result?;
        outcome.manifest.merge(manifest);
        outcome.stats.merge(stats);
    }
    outcome.manifest.malformed = outcome.stats.malformed_records;
    outcome.manifest.shard_paths.sort();
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::write_shard;
    use tempfile::tempdir;

    fn clean_doc(i: usize, source: &str) -> Document {
        let text = format!(
            "أعلنت الوزارة اليوم عن مشروع تنموي جديد رقم {i} في المنطقة الشرقية من البلاد.\n\
             وقال المسؤولون إن التنفيذ سيبدأ مطلع العام المقبل بتمويل حكومي كامل وإشراف مباشر.\n\
             ومن المنتظر أن يوفر المشروع مئات الوظائف الجديدة لسكان المنطقة خلال خمس سنوات."
        );
        Document::new(format!("{source}/0/{i}"), text, source)
    }

    #[test]
    fn partition_and_planted_tallies() {
        let dir = tempdir().unwrap();
        let mut docs: Vec<Document> = (0..20).map(|i| clean_doc(i, "a")).collect();
        // plant 5 curly-bracket docs that pass every earlier check
        for i in 0..5 {
            let mut d = clean_doc(100 + i, "a");
            let text = format!("{} {{template}}", d.text);
            d.set_text(text);
            docs.push(d);
        }
        let input = dir.path().join("a-0000.jsonl");
        write_shard(docs.iter(), &input, &UnitMode::Words).unwrap();

        let out = dir.path().join("filtered");
        let sources = [SourceInput {
            name: "a".into(),
            pattern: input.display().to_string(),
        }];
        let outcome = run_filter_stage(
            &sources,
            &out,
            &FilterConfig::default(),
            &UnitMode::Words,
            false,
        )
        .unwrap();

        let stats = &outcome.stats;
        assert_eq!(stats.total_input(), 25);
        assert_eq!(stats.total_output(), 20);
        assert_eq!(stats.reason_tallies["curly_brackets"], 5);
        assert_eq!(stats.total_output() + stats.total_removed(), 25);
        assert_eq!(stats.primary_cause("a"), Some("curly_brackets"));
        assert!((stats.drop_rate("a") - 0.2).abs() < 1e-12);
        assert_eq!(outcome.manifest.per_source_doc_counts["a"], 20);
    }

    #[test]
    fn all_pass_corpus_is_identity() {
        let dir = tempdir().unwrap();
        let docs: Vec<Document> = (0..10).map(|i| clean_doc(i, "b")).collect();
        let input = dir.path().join("b-0000.jsonl");
        write_shard(docs.iter(), &input, &UnitMode::Words).unwrap();

        let outcome = run_filter_stage(
            &[SourceInput {
                name: "b".into(),
                pattern: input.display().to_string(),
            }],
            &dir.path().join("out"),
            &FilterConfig::default(),
            &UnitMode::Words,
            false,
        )
        .unwrap();
        assert_eq!(outcome.stats.total_output(), 10);
        assert!(outcome.stats.reason_tallies.is_empty());
        assert_eq!(outcome.stats.removed_lines, 0);
    }

    #[test]
    fn missing_pattern_is_config_error() {
        let dir = tempdir().unwrap();
        let err = run_filter_stage(
            &[SourceInput {
                name: "x".into(),
                pattern: format!("{}/nothing-*.jsonl", dir.path().display()),
            }],
            &dir.path().join("out"),
            &FilterConfig::default(),
            &UnitMode::Words,
            false,
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn stats_roundtrip() {
        let mut stats = FilterStats::default();
        stats.record("a", None, 120, 115);
        stats.record("a", Some(Reason::NoAlpha), 40, 0);
        let dir = tempdir().unwrap();
        let path = dir.path().join("stats.json");
        stats.write(&path).unwrap();
        assert_eq!(FilterStats::read(&path).unwrap(), stats);
    }
}
