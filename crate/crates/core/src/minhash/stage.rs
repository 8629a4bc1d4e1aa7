//! Near-duplicate stage: sign every document, bucket, cluster, pick
//! survivors, and emit kept shards plus the consensus subset.

use super::cluster::{
    select_representatives, ConsensusRecord, DocMeta, DuplicateCluster, SourcePriority,
};
use super::lsh::candidate_pairs;
use super::params::MinHashParams;
use super::shingle::shingle;
use super::signature::{signature, HashFamily, MinHashSignature};
use super::sigio;
use super::union_find::UnionFind;
use crate::doc::{Document, UnitMode};
use crate::error::{Error, Result};
use crate::filter::SourceInput;
use crate::io::{read_shards, write_shard, ShardManifest};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct MinhashStats {
    pub per_source_input_docs: BTreeMap<String, u64>,
    pub per_source_input_units: BTreeMap<String, u64>,
    pub per_source_output_docs: BTreeMap<String, u64>,
    pub per_source_output_units: BTreeMap<String, u64>,
    pub candidate_pairs: u64,
    pub cluster_count: u64,
    pub docs_removed: u64,
    /// Units carried by removed (non-representative) documents.
    pub units_removed: u64,
    pub malformed_records: u64,
}

impl MinhashStats {
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

    pub fn read(path: &Path) -> Result<MinhashStats> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_slice(&bytes)
            .map_err(|e| Error::data(format!("{}: bad stats: {e}", path.display())))
    }
}

#[derive(Debug)]
pub struct MinhashOutcome {
    pub manifest: ShardManifest,
    pub stats: MinhashStats,
    pub clusters: Vec<DuplicateCluster>,
}

pub fn write_consensus(path: &Path, records: &[ConsensusRecord]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for record in records {
        let line = serde_json::to_string(record)
            .map_err(|e| Error::data(format!("consensus serialization: {e}")))?;
        w.write_all(line.as_bytes())
            .and_then(|_| w.write_all(b"\n"))
            .map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_consensus(path: &Path) -> Result<Vec<ConsensusRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: ConsensusRecord = serde_json::from_str(&line).map_err(|e| {
            Error::data(format!("{} line {}: bad consensus record: {e}", path.display(), idx + 1))
        })?;
        out.push(record);
    }
    Ok(out)
}

/// Run near-duplicate detection across all sources.
///
/// Reads every source's shards in the given order (doc refs are read
/// ordinals), signs in parallel, buckets, clusters, and keeps one
/// representative per cluster by `priority`. Writes into `out_dir`:
/// `signatures.bin`, `signature_metas.json`, `consensus.jsonl`,
/// `clusters.json`, and one kept shard per source.
pub fn run_minhash_stage(
    sources: &[SourceInput],
    out_dir: &Path,
    params: &MinHashParams,
    priority: &[String],
    units: &UnitMode,
    gzip: bool,
) -> Result<MinhashOutcome> {
    params.validate()?;
    let ranked = SourcePriority::new(priority);
    for source in sources {
        ranked.rank(&source.name)?;
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let mut docs: Vec<Document> = Vec::new();
    let mut malformed = 0u64;
    let mut stats = MinhashStats::default();
    for source in sources {
        // an empty match is a config mistake; matched-but-empty shards are
        // a legitimately emptied source
        if crate::io::expand_pattern(&source.pattern)?.is_empty() {
            return Err(Error::config(format!(
                "source `{}`: no shards match pattern `{}`",
                source.name, source.pattern
            )));
        }
        let read = read_shards(&source.pattern, &source.name)?;
        malformed += read.malformed;
        docs.extend(read.docs);
    }
    stats.malformed_records = malformed;

    let metas: Vec<DocMeta> = docs
        .iter()
        .map(|d| DocMeta {
            id: d.id.clone(),
            source: d.source.clone(),
            units: units.units_of(d),
        })
        .collect();
    for meta in &metas {
        *stats
            .per_source_input_docs
            .entry(meta.source.clone())
            .or_insert(0) += 1;
        *stats
            .per_source_input_units
            .entry(meta.source.clone())
            .or_insert(0) += meta.units;
    }

    let family = HashFamily::from_params(params);
    let signatures: Vec<MinHashSignature> = docs
        .par_iter()
        .enumerate()
        .map(|(i, d)| signature(i as u64, &shingle(&d.text, params), &family))
        .collect::<Result<_>>()?;
    sigio::write_signatures(&out_dir.join("signatures.bin"), &signatures, params.num_hashes())?;
    sigio::write_metas(&out_dir.join("signature_metas.json"), &metas)?;

    let pairs = candidate_pairs(&signatures, params);
    stats.candidate_pairs = pairs.len() as u64;
    let mut forest = UnionFind::new(docs.len());
    for &(a, b) in &pairs {
        forest.union(a as usize, b as usize);
    }
    let components = forest.components();
    let outcome = select_representatives(&components, &metas, &ranked)?;
    stats.cluster_count = outcome.clusters.len() as u64;
    stats.docs_removed = outcome.remove.len() as u64;
    stats.units_removed = outcome.clusters.iter().map(|c| c.token_units).sum();

    let consensus: Vec<ConsensusRecord> = components
        .iter()
        .zip(&outcome.clusters)
        .map(|(comp, cluster)| {
            let rep = comp
                .iter()
                .copied()
                .find(|&m| metas[m].id == cluster.representative_id)
                .expect("representative is a member");
            ConsensusRecord {
                text: docs[rep].text.clone(),
                sources: cluster.sources.clone(),
                cluster_size: comp.len(),
                units: cluster.token_units,
            }
        })
        .collect();
    write_consensus(&out_dir.join("consensus.jsonl"), &consensus)?;
    let clusters_json = serde_json::to_string_pretty(&outcome.clusters)
        .map_err(|e| Error::data(format!("cluster serialization: {e}")))?;
    let clusters_path = out_dir.join("clusters.json");
    std::fs::write(&clusters_path, clusters_json).map_err(|e| Error::io(&clusters_path, e))?;

    let removed: HashSet<usize> = outcome.remove.iter().copied().collect();
    let mut manifest = ShardManifest::default();
    let ext = if gzip { "jsonl.gz" } else { "jsonl" };
    for source in sources {
        let kept = docs
            .iter()
            .enumerate()
            .filter(|(i, d)| d.source == source.name && !removed.contains(i))
            .map(|(_, d)| d);
        let out_path = out_dir.join(format!("{}-0000.{ext}", source.name));
        manifest.add_shard(write_shard(kept, &out_path, units)?);
    }
    manifest.malformed = malformed;
    manifest.shard_paths.sort();
    for (src, n) in &manifest.per_source_doc_counts {
        stats.per_source_output_docs.insert(src.clone(), *n);
    }
    for (src, n) in &manifest.per_source_unit_counts {
        stats.per_source_output_units.insert(src.clone(), *n);
    }
    // sources whose every document was removed still need an output row
    for source in sources {
        stats.per_source_output_docs.entry(source.name.clone()).or_insert(0);
        stats.per_source_output_units.entry(source.name.clone()).or_insert(0);
    }

    Ok(MinhashOutcome {
        manifest,
        stats,
        clusters: outcome.clusters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn article(i: usize) -> String {
        crate::testutil::distinct_text(i)
    }

    fn write_source(dir: &Path, name: &str, texts: &[String]) -> SourceInput {
        let docs: Vec<Document> = texts
            .iter()
            .enumerate()
            .map(|(i, t)| Document::new(format!("{name}/0/{i}"), t.clone(), name))
            .collect();
        let path = dir.join(format!("{name}-0000.jsonl"));
        write_shard(docs.iter(), &path, &UnitMode::Words).unwrap();
        SourceInput {
            name: name.into(),
            pattern: path.display().to_string(),
        }
    }

    #[test]
    fn exact_cross_source_duplicates_are_removed_by_priority() {
        let dir = tempdir().unwrap();
        let a_texts: Vec<String> = (0..4).map(article).collect();
        let b_texts = vec![a_texts[0].clone(), a_texts[1].clone(), article(6)];
        let a = write_source(dir.path(), "a", &a_texts);
        let b = write_source(dir.path(), "b", &b_texts);

        let out = dir.path().join("deduped");
        let outcome = run_minhash_stage(
            &[a, b],
            &out,
            &MinHashParams::default(),
            &["a".into(), "b".into()],
            &UnitMode::Words,
            false,
        )
        .unwrap();

        assert_eq!(outcome.stats.cluster_count, 2);
        assert_eq!(outcome.stats.docs_removed, 2);
        assert_eq!(outcome.stats.per_source_output_docs["a"], 4);
        assert_eq!(outcome.stats.per_source_output_docs["b"], 1);
        for cluster in &outcome.clusters {
            assert!(cluster.representative_id.starts_with("a/"));
            assert_eq!(cluster.sources, vec!["a", "b"]);
        }

        let consensus = read_consensus(&out.join("consensus.jsonl")).unwrap();
        assert_eq!(consensus.len(), 2);
        assert!(consensus.iter().all(|c| c.cluster_size == 2));

        let kept_b = crate::io::read_shards(&out.join("b-0000.jsonl").display().to_string(), "b")
            .unwrap()
            .docs;
        assert_eq!(kept_b.len(), 1);
        assert_eq!(kept_b[0].text, article(6));
    }

    #[test]
    fn no_duplicates_is_identity() {
        let dir = tempdir().unwrap();
        let a = write_source(dir.path(), "a", &(0..5).map(article).collect::<Vec<_>>());
        let out = dir.path().join("deduped");
        let outcome = run_minhash_stage(
            &[a],
            &out,
            &MinHashParams::default(),
            &["a".into()],
            &UnitMode::Words,
            false,
        )
        .unwrap();
        assert_eq!(outcome.stats.cluster_count, 0);
        assert_eq!(outcome.stats.docs_removed, 0);
        assert_eq!(outcome.stats.total_output(), 5);
        assert!(read_consensus(&out.join("consensus.jsonl")).unwrap().is_empty());
    }

    #[test]
    fn source_missing_from_priority_is_rejected_upfront() {
        let dir = tempdir().unwrap();
        let a = write_source(dir.path(), "a", &[article(0)]);
        let err = run_minhash_stage(
            &[a],
            &dir.path().join("deduped"),
            &MinHashParams::default(),
            &["b".into()],
            &UnitMode::Words,
            false,
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains('a'));
    }

    #[test]
    fn reruns_are_byte_identical() {
        let dir = tempdir().unwrap();
        let a_texts: Vec<String> = (0..6).map(article).collect();
        let b_texts = vec![a_texts[2].clone(), article(7), a_texts[4].clone()];
        let a = write_source(dir.path(), "a", &a_texts);
        let b = write_source(dir.path(), "b", &b_texts);
        let sources = [a, b];
        let priority = ["a".to_string(), "b".to_string()];

        let mut bytes = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("run{run}"));
            run_minhash_stage(
                &sources,
                &out,
                &MinHashParams::default(),
                &priority,
                &UnitMode::Words,
                false,
            )
            .unwrap();
            let mut blob = Vec::new();
            for name in ["consensus.jsonl", "a-0000.jsonl", "b-0000.jsonl", "signatures.bin"] {
                blob.extend(std::fs::read(out.join(name)).unwrap());
            }
            bytes.push(blob);
        }
        assert_eq!(bytes[0], bytes[1]);
    }
}
