//! Disk-backed span count store.
//!
//! The durable format is a sorted run: an 8-byte magic, then fixed 24-byte
//! records of (16-byte span hash, 8-byte count), little-endian, strictly
//! ascending by hash. Partial stores merge by streaming k-way union with
//! counts added, so any shard partitioning of the corpus yields the same
//! merged store. Lookups binary-search an in-memory image of the run.

use crate::error::{Error, Result};
use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use std::collections::{BinaryHeap, HashMap};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

const MAGIC: &[u8; 8] = b"spancnt1";
const RECORD_BYTES: u64 = 24;

/// In-memory accumulator for one partial store.
#[derive(Debug, Default)]
pub struct StoreBuilder {
    counts: HashMap<u128, u64>,
}

impl StoreBuilder {
    pub fn new() -> Self {
        StoreBuilder::default()
    }

    pub fn add(&mut self, hash: u128) {
        *self.counts.entry(hash).or_insert(0) += 1;
    }

    pub fn add_count(&mut self, hash: u128, n: u64) {
        *self.counts.entry(hash).or_insert(0) += n;
    }

    pub fn absorb(&mut self, other: StoreBuilder) {
        for (hash, n) in other.counts {
            *self.counts.entry(hash).or_insert(0) += n;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Persist as a sorted run.
    pub fn write(self, path: &Path) -> Result<()> {
        let mut entries: Vec<(u128, u64)> = self.counts.into_iter().collect();
        entries.sort_unstable_by_key(|&(h, _)| h);
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let mut go = || -> std::io::Result<()> {
            w.write_all(MAGIC)?;
            for (hash, count) in &entries {
                w.write_u128::<LittleEndian>(*hash)?;
                w.write_u64::<LittleEndian>(*count)?;
            }
            w.flush()
        };
        go().map_err(|e| Error::io(path, e))
    }
}

struct RunReader {
    reader: BufReader<File>,
    remaining: u64,
    path: PathBuf,
}

impl RunReader {
    fn open(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let len = file.metadata().map_err(|e| Error::io(path, e))?.len();
        let mut reader = BufReader::new(file);
        let mut magic = [0u8; 8];
        std::io::Read::read_exact(&mut reader, &mut magic).map_err(|e| Error::io(path, e))?;
        if &magic != MAGIC || (len - 8) % RECORD_BYTES != 0 {
            return Err(Error::data(format!(
                "{}: not a span count store",
                path.display()
            )));
        }
        Ok(RunReader {
            reader,
            remaining: (len - 8) / RECORD_BYTES,
            path: path.to_path_buf(),
        })
    }

    fn next(&mut self) -> Result<Option<(u128, u64)>> {
        if self.remaining == 0 {
            return Ok(None);
        }
        self.remaining -= 1;
        let hash = self
            .reader
            .read_u128::<LittleEndian>()
            .map_err(|e| Error::io(&self.path, e))?;
        let count = self
            .reader
            .read_u64::<LittleEndian>()
            .map_err(|e| Error::io(&self.path, e))?;
        Ok(Some((hash, count)))
    }
}

/// Merge sorted-run stores into one: counts for equal hashes add up.
pub fn merge_stores(inputs: &[PathBuf], output: &Path) -> Result<()> {
    let mut readers = Vec::with_capacity(inputs.len());
    // heap of Reverse((next hash, reader index)) drives the k-way union
    let mut heap: BinaryHeap<std::cmp::Reverse<(u128, usize)>> = BinaryHeap::new();
    let mut pending: Vec<u64> = Vec::with_capacity(inputs.len());
    for (idx, input) in inputs.iter().enumerate() {
        let mut reader = RunReader::open(input)?;
        pending.push(0);
        if let Some((hash, count)) = reader.next()? {
            pending[idx] = count;
            heap.push(std::cmp::Reverse((hash, idx)));
        }
        readers.push(reader);
    }

    let file = File::create(output).map_err(|e| Error::io(output, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(MAGIC).map_err(|e| Error::io(output, e))?;
    let mut current: Option<(u128, u64)> = None;
    while let Some(std::cmp::Reverse((hash, idx))) = heap.pop() {
        let count = pending[idx];
        match current {
            Some((h, n)) if h == hash => current = Some((h, n + count)),
            Some((h, n)) => {
                w.write_u128::<LittleEndian>(h)
                    .and_then(|_| w.write_u64::<LittleEndian>(n))
                    .map_err(|e| Error::io(output, e))?;
                current = Some((hash, count));
            }
            None => current = Some((hash, count)),
        }
        if let Some((next_hash, next_count)) = readers[idx].next()? {
            pending[idx] = next_count;
            heap.push(std::cmp::Reverse((next_hash, idx)));
        }
    }
    if let Some((h, n)) = current {
        w.write_u128::<LittleEndian>(h)
            .and_then(|_| w.write_u64::<LittleEndian>(n))
            .map_err(|e| Error::io(output, e))?;
    }
    w.flush().map_err(|e| Error::io(output, e))
}

/// Read-only view of a merged store. Cheap to share across threads.
#[derive(Debug)]
pub struct SpanCountStore {
    entries: Vec<(u128, u64)>,
}

impl SpanCountStore {
    pub fn open(path: &Path) -> Result<Self> {
        let mut reader = RunReader::open(path)?;
        let mut entries = Vec::with_capacity(reader.remaining as usize);
        let mut last: Option<u128> = None;
        while let Some((hash, count)) = reader.next()? {
            if last.is_some_and(|prev| prev >= hash) {
                return Err(Error::data(format!(
                    "{}: store records out of order",
                    path.display()
                )));
            }
            last = Some(hash);
            entries.push((hash, count));
        }
        Ok(SpanCountStore { entries })
    }

    pub fn count(&self, hash: u128) -> u64 {
        match self.entries.binary_search_by_key(&hash, |&(h, _)| h) {
            Ok(i) => self.entries[i].1,
            Err(_) => 0,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u128, u64)> + '_ {
        self.entries.iter().copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn build(path: &Path, pairs: &[(u128, u64)]) {
        let mut b = StoreBuilder::new();
        for &(h, n) in pairs {
            b.add_count(h, n);
        }
        b.write(path).unwrap();
    }

    #[test]
    fn build_and_query() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("s.store");
        build(&path, &[(7, 3), (1, 1), (500, 2)]);
        let store = SpanCountStore::open(&path).unwrap();
        assert_eq!(store.len(), 3);
        assert_eq!(store.count(7), 3);
        assert_eq!(store.count(1), 1);
        assert_eq!(store.count(999), 0);
    }

    #[test]
    fn merge_adds_counts() {
        let dir = tempdir().unwrap();
        let a = dir.path().join("a.store");
        let b = dir.path().join("b.store");
        let merged = dir.path().join("m.store");
        build(&a, &[(10, 2), (20, 1)]);
        build(&b, &[(10, 2), (30, 5)]);
        merge_stores(&[a, b], &merged).unwrap();
        let store = SpanCountStore::open(&merged).unwrap();
        assert_eq!(store.count(10), 4);
        assert_eq!(store.count(20), 1);
        assert_eq!(store.count(30), 5);
        assert_eq!(store.len(), 3);
    }

    #[test]
    fn merge_is_partition_independent() {
        let dir = tempdir().unwrap();
        let all: Vec<(u128, u64)> = (0..100u128).map(|h| (h * 7919, (h % 5 + 1) as u64)).collect();

        let whole = dir.path().join("whole.store");
        build(&whole, &all);

        let parts: Vec<PathBuf> = all
            .chunks(33)
            .enumerate()
            .map(|(i, chunk)| {
                let p = dir.path().join(format!("part{i}.store"));
                build(&p, chunk);
                p
            })
            .collect();
        let merged = dir.path().join("merged.store");
        merge_stores(&parts, &merged).unwrap();

        let a = SpanCountStore::open(&whole).unwrap();
        let b = SpanCountStore::open(&merged).unwrap();
        assert_eq!(a.entries, b.entries);
    }

    #[test]
    fn empty_merge_is_an_empty_store() {
        let dir = tempdir().unwrap();
        let out = dir.path().join("empty.store");
        merge_stores(&[], &out).unwrap();
        let store = SpanCountStore::open(&out).unwrap();
        assert!(store.is_empty());
        assert_eq!(store.count(1), 0);
    }

    #[test]
    fn garbage_file_is_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.store");
        std::fs::write(&path, b"not a store at all").unwrap();
        let err = SpanCountStore::open(&path).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
