//! Shard I/O: newline-delimited JSON records, UTF-8, optional gzip.
//!
//! One record per line with required field `text`, optional `id` and
//! `source`; unknown fields ride along untouched. Compression is decided
//! by the `.gz` suffix on both read and write. Reads are deterministic:
//! lexicographic path order, then line order.

use crate::doc::{Document, UnitMode};
use crate::error::{Error, Result};
use flate2::read::MultiGzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

/// Wire form of one shard line.
#[derive(Debug, Serialize, Deserialize)]
struct Record {
    #[serde(skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    text: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    source: Option<String>,
    #[serde(flatten)]
    extra: BTreeMap<String, Value>,
}

/// Documents read from one shard file plus the malformed-line tally.
#[derive(Debug, Default)]
pub struct ShardRead {
    pub docs: Vec<Document>,
    pub malformed: u64,
}

/// Accounting entry for one written shard.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ShardEntry {
    pub path: PathBuf,
    pub doc_count: u64,
    pub per_source_docs: BTreeMap<String, u64>,
    pub per_source_units: BTreeMap<String, u64>,
}

/// Manifest over a set of shards; merges associatively across workers.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct ShardManifest {
    pub shard_paths: Vec<PathBuf>,
    pub per_source_doc_counts: BTreeMap<String, u64>,
    pub per_source_unit_counts: BTreeMap<String, u64>,
    pub malformed: u64,
}

impl ShardManifest {
    pub fn add_shard(&mut self, entry: ShardEntry) {
        self.shard_paths.push(entry.path);
        for (src, n) in entry.per_source_docs {
            *self.per_source_doc_counts.entry(src).or_insert(0) += n;
        }
        for (src, n) in entry.per_source_units {
            *self.per_source_unit_counts.entry(src).or_insert(0) += n;
        }
    }

    pub fn merge(&mut self, other: ShardManifest) {
        self.shard_paths.extend(other.shard_paths);
        for (src, n) in other.per_source_doc_counts {
            *self.per_source_doc_counts.entry(src).or_insert(0) += n;
        }
        for (src, n) in other.per_source_unit_counts {
            *self.per_source_unit_counts.entry(src).or_insert(0) += n;
        }
        self.malformed += other.malformed;
    }

    pub fn total_docs(&self) -> u64 {
        self.per_source_doc_counts.values().sum()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::data(format!("manifest serialization: {e}")))?;
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<ShardManifest> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_slice(&bytes)
            .map_err(|e| Error::data(format!("{}: bad manifest: {e}", path.display())))
    }
}

/// Expand a glob pattern into an ordered (lexicographic) list of paths.
pub fn expand_pattern(pattern: &str) -> Result<Vec<PathBuf>> {
    let entries = glob::glob(pattern).map_err(|e| Error::Pattern {
        pattern: pattern.to_string(),
        message: e.to_string(),
    })?;
    let mut paths = Vec::new();
    for entry in entries {
        match entry {
            Ok(p) => {
                if p.is_file() {
                    paths.push(p);
                }
            }
            Err(e) => return Err(Error::io(e.path().to_path_buf(), e.into())),
        }
    }
    paths.sort();
    Ok(paths)
}

fn open_reader(path: &Path) -> Result<Box<dyn BufRead>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader: Box<dyn Read> = if path.extension().is_some_and(|ext| ext == "gz") {
        Box::new(MultiGzDecoder::new(file))
    } else {
        Box::new(file)
    };
    Ok(Box::new(BufReader::new(reader)))
}

/// Read one shard file. Malformed lines are skipped and tallied; ids default
/// to `<source>/<shard_idx>/<line_idx>` when the record carries none.
pub fn read_shard_file(path: &Path, source: &str, shard_idx: usize) -> Result<ShardRead> {
    let reader = open_reader(path)?;
    let mut out = ShardRead::default();
    for (line_idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: Record = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(_) => {
                out.malformed += 1;
                continue;
            }
        };
        let id = record
            .id
            .unwrap_or_else(|| format!("{source}/{shard_idx}/{line_idx}"));
        let src = record.source.unwrap_or_else(|| source.to_string());
        let mut doc = Document::new(id, record.text, src);
        doc.extra = record.extra;
        out.docs.push(doc);
    }
    Ok(out)
}

/// Read every shard matching `pattern`, tagged with `source`, in
/// deterministic order.
pub fn read_shards(pattern: &str, source: &str) -> Result<ShardRead> {
    let paths = expand_pattern(pattern)?;
    let mut all = ShardRead::default();
    for (shard_idx, path) in paths.iter().enumerate() {
        let mut one = read_shard_file(path, source, shard_idx)?;
        all.docs.append(&mut one.docs);
        all.malformed += one.malformed;
    }
    Ok(all)
}

fn open_writer(path: &Path) -> Result<Box<dyn Write>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let writer: Box<dyn Write> = if path.extension().is_some_and(|ext| ext == "gz") {
        Box::new(GzEncoder::new(file, Compression::default()))
    } else {
        Box::new(file)
    };
    Ok(Box::new(BufWriter::new(writer)))
}

/// Write documents to one shard file, returning its manifest entry.
/// A partially written shard is removed on error.
pub fn write_shard<'a, I>(docs: I, path: &Path, units: &UnitMode) -> Result<ShardEntry>
where
    I: IntoIterator<Item = &'a Document>,
{
    let result = write_shard_inner(docs, path, units);
    if result.is_err() {
        let _ = std::fs::remove_file(path);
    }
    result
}

fn write_shard_inner<'a, I>(docs: I, path: &Path, units: &UnitMode) -> Result<ShardEntry>
where
    I: IntoIterator<Item = &'a Document>,
{
    let mut writer = open_writer(path)?;
    let mut entry = ShardEntry {
        path: path.to_path_buf(),
        doc_count: 0,
        per_source_docs: BTreeMap::new(),
        per_source_units: BTreeMap::new(),
    };
    for doc in docs {
        let record = Record {
            id: Some(doc.id.clone()),
            text: doc.text.clone(),
            source: Some(doc.source.clone()),
            extra: doc.extra.clone(),
        };
        let line = serde_json::to_string(&record)
            .map_err(|e| Error::data(format!("record serialization: {e}")))?;
        writer
            .write_all(line.as_bytes())
            .and_then(|_| writer.write_all(b"\n"))
            .map_err(|e| Error::io(path, e))?;
        entry.doc_count += 1;
        *entry.per_source_docs.entry(doc.source.clone()).or_insert(0) += 1;
        *entry.per_source_units.entry(doc.source.clone()).or_insert(0) += units.units_of(doc);
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(entry)
}
