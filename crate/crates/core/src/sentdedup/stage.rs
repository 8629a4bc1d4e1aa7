//! Two-phase sentence-span dedup: count spans corpus-wide, then strip
//! over-represented spans and drop eviscerated documents.

use super::sentences::split_sentences;
use super::spans::{eligible_indices, span_signatures, SpanParams};
use super::store::{merge_stores, SpanCountStore, StoreBuilder};
use crate::doc::{Document, UnitMode};
use crate::error::{Error, Result};
use crate::filter::SourceInput;
use crate::io::{expand_pattern, read_shard_file, write_shard, ShardManifest};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Sign,
    Filter,
    Both,
}

impl std::str::FromStr for Phase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sign" => Ok(Phase::Sign),
            "filter" => Ok(Phase::Filter),
            "both" => Ok(Phase::Both),
            other => Err(Error::config(format!(
                "unknown phase `{other}` (expected sign, filter, or both)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct SentDedupStats {
    pub per_source_input_docs: BTreeMap<String, u64>,
    pub per_source_input_units: BTreeMap<String, u64>,
    pub per_source_output_docs: BTreeMap<String, u64>,
    pub per_source_output_units: BTreeMap<String, u64>,
    pub distinct_spans: u64,
    /// Spans at or above the duplicate threshold.
    pub flagged_spans: u64,
    pub sentences_removed: u64,
    /// Documents kept with at least one sentence removed.
    pub docs_modified: u64,
    /// Documents dropped for falling below the word floor after removal.
    pub docs_discarded: u64,
    pub malformed_records: u64,
}

impl SentDedupStats {
    pub fn merge(&mut self, other: SentDedupStats) {
        for (k, v) in other.per_source_input_docs {
            *self.per_source_input_docs.entry(k).or_insert(0) += v;
        }
        for (k, v) in other.per_source_input_units {
            *self.per_source_input_units.entry(k).or_insert(0) += v;
        }
        for (k, v) in other.per_source_output_docs {
            *self.per_source_output_docs.entry(k).or_insert(0) += v;
        }
        for (k, v) in other.per_source_output_units {
            *self.per_source_output_units.entry(k).or_insert(0) += v;
        }
        self.distinct_spans += other.distinct_spans;
        self.flagged_spans += other.flagged_spans;
        self.sentences_removed += other.sentences_removed;
        self.docs_modified += other.docs_modified;
        self.docs_discarded += other.docs_discarded;
        self.malformed_records += other.malformed_records;
    }

    pub fn total_input(&self) -> u64 {
        self.per_source_input_docs.values().sum()
    }

    pub fn total_output(&self) -> u64 {
        self.per_source_output_docs.values().sum()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::data(format!("stats serialization: {e}")))?;
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<SentDedupStats> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_slice(&bytes)
            .map_err(|e| Error::data(format!("{}: bad stats: {e}", path.display())))
    }
}

#[derive(Debug)]
pub struct SentDedupOutcome {
    pub manifest: ShardManifest,
    pub stats: SentDedupStats,
}

fn shard_work(sources: &[SourceInput]) -> Result<Vec<(String, PathBuf, usize)>> {
    let mut work = Vec::new();
    for source in sources {
        let paths = expand_pattern(&source.pattern)?;
        if paths.is_empty() {
            return Err(Error::config(format!(
                "source `{}`: no shards match pattern `{}`",
                source.name, source.pattern
            )));
        }
        for (idx, path) in paths.into_iter().enumerate() {
            work.push((source.name.clone(), path, idx));
        }
    }
    Ok(work)
}

fn doc_span_hashes(doc: &Document, params: &SpanParams) -> Vec<u128> {
    let sentences = split_sentences(&doc.text);
    let eligible = eligible_indices(&sentences, params);
    span_signatures(&sentences, &eligible, params)
}

/// Phase 1: count every span across the corpus into a store at
/// `store_path`. Partial per-shard stores are merged and removed.
pub fn run_sign_phase(
    sources: &[SourceInput],
    store_path: &Path,
    params: &SpanParams,
) -> Result<()> {
    params.validate()?;
    let work = shard_work(sources)?;
    if let Some(parent) = store_path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    let parts_dir = store_path.with_extension("parts");
    std::fs::create_dir_all(&parts_dir).map_err(|e| Error::io(&parts_dir, e))?;

    let parts: Vec<PathBuf> = work
        .par_iter()
        .enumerate()
        .map(|(part_idx, (source, path, shard_idx))| {
            let read = read_shard_file(path, source, *shard_idx)?;
            let mut builder = StoreBuilder::new();
            for doc in &read.docs {
                for hash in doc_span_hashes(doc, params) {
                    builder.add(hash);
                }
            }
            let part_path = parts_dir.join(format!("part-{part_idx:04}.store"));
            builder.write(&part_path)?;
            Ok(part_path)
        })
        .collect::<Result<_>>()?;

    let result = merge_stores(&parts, store_path);
    let _ = std::fs::remove_dir_all(&parts_dir);
    result
}

/// Strip flagged spans from one document.
///
/// Returns the surviving document (None = discard) and how many sentences
/// came out. A document with no flagged span passes through untouched,
/// byte for byte. Otherwise surviving sentences are rejoined with single
/// spaces on their original lines, and a result below
/// `min_doc_words_after` words is discarded.
pub fn apply_span_filter(
    doc: &Document,
    store: &SpanCountStore,
    params: &SpanParams,
) -> (Option<Document>, u64) {
    let sentences = split_sentences(&doc.text);
    let eligible = eligible_indices(&sentences, params);
    let hashes = span_signatures(&sentences, &eligible, params);
    let mut flagged = vec![false; eligible.len()];
    let mut any = false;
    for (w, hash) in hashes.iter().enumerate() {
        if store.count(*hash) >= params.dup_threshold {
            for slot in &mut flagged[w..w + params.span_size] {
                *slot = true;
            }
            any = true;
        }
    }
    if !any {
        return (Some(doc.clone()), 0);
    }

    let removed: HashSet<usize> = eligible
        .iter()
        .zip(&flagged)
        .filter(|(_, &f)| f)
        .map(|(&idx, _)| idx)
        .collect();
    let mut lines: Vec<String> = vec![String::new(); doc.text.split('\n').count()];
    for (idx, sentence) in sentences.iter().enumerate() {
        if removed.contains(&idx) {
            continue;
        }
        let slot = &mut lines[sentence.line];
        if !slot.is_empty() {
            slot.push(' ');
        }
        slot.push_str(&sentence.text);
    }
    let mut out = doc.clone();
    out.set_text(lines.join("\n"));
    let removed_count = removed.len() as u64;
    if out.word_count < params.min_doc_words_after {
        (None, removed_count)
    } else {
        (Some(out), removed_count)
    }
}

/// Phase 2: apply the merged store to every document and write surviving
/// shards under `out_dir`.
pub fn run_filter_phase(
    sources: &[SourceInput],
    out_dir: &Path,
    store_path: &Path,
    params: &SpanParams,
    units: &UnitMode,
    gzip: bool,
) -> Result<SentDedupOutcome> {
    params.validate()?;
    let work = shard_work(sources)?;
    let store = SpanCountStore::open(store_path)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let results: Vec<Result<(ShardManifest, SentDedupStats)>> = work
        .par_iter()
        .map(|(source, path, shard_idx)| {
            let read = read_shard_file(path, source, *shard_idx)?;
            let mut stats = SentDedupStats {
                malformed_records: read.malformed,
                ..SentDedupStats::default()
            };
            let mut kept: Vec<Document> = Vec::with_capacity(read.docs.len());
            for doc in &read.docs {
                *stats
                    .per_source_input_docs
                    .entry(doc.source.clone())
                    .or_insert(0) += 1;
                *stats
                    .per_source_input_units
                    .entry(doc.source.clone())
                    .or_insert(0) += units.units_of(doc);
                let (survivor, removed) = apply_span_filter(doc, &store, params);
                stats.sentences_removed += removed;
                match survivor {
                    Some(d) => {
                        if removed > 0 {
                            stats.docs_modified += 1;
                        }
                        kept.push(d);
                    }
                    None => stats.docs_discarded += 1,
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

    let mut outcome = SentDedupOutcome {
        manifest: ShardManifest::default(),
        stats: SentDedupStats::default(),
    };
    for result in results {
        let (manifest, stats) = result?;
        outcome.manifest.merge(manifest);
        outcome.stats.merge(stats);
    }
    outcome.manifest.malformed = outcome.stats.malformed_records;
    outcome.manifest.shard_paths.sort();
    outcome.stats.distinct_spans = store.len() as u64;
    outcome.stats.flagged_spans = store
        .iter()
        .filter(|&(_, n)| n >= params.dup_threshold)
        .count() as u64;
    for source in sources {
        outcome
            .stats
            .per_source_output_docs
            .entry(source.name.clone())
            .or_insert(0);
        outcome
            .stats
            .per_source_output_units
            .entry(source.name.clone())
            .or_insert(0);
    }
    for (src, n) in &outcome.manifest.per_source_doc_counts {
        outcome.stats.per_source_output_docs.insert(src.clone(), *n);
    }
    for (src, n) in &outcome.manifest.per_source_unit_counts {
        outcome.stats.per_source_output_units.insert(src.clone(), *n);
    }
    Ok(outcome)
}

/// Run the selected phase(s). Sign-only returns None; the store file is
/// the deliverable.
pub fn run_sentdedup_stage(
    sources: &[SourceInput],
    out_dir: &Path,
    store_path: &Path,
    params: &SpanParams,
    units: &UnitMode,
    gzip: bool,
    phase: Phase,
) -> Result<Option<SentDedupOutcome>> {
    match phase {
        Phase::Sign => {
            run_sign_phase(sources, store_path, params)?;
            Ok(None)
        }
        Phase::Filter => {
            run_filter_phase(sources, out_dir, store_path, params, units, gzip).map(Some)
        }
        Phase::Both => {
            run_sign_phase(sources, store_path, params)?;
            run_filter_phase(sources, out_dir, store_path, params, units, gzip).map(Some)
        }
    }
}
