//! Signature persistence.
//!
//! Signatures land in a flat binary file of fixed-width little-endian
//! records: an 8-byte doc ref followed by `num_hashes` 8-byte values.
//! Document metadata (id, source, units) goes to a JSON sidecar in ref
//! order so a later phase can rebuild the ref -> document mapping.

use super::cluster::DocMeta;
use super::signature::MinHashSignature;
use crate::error::{Error, Result};
use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

pub fn write_signatures(
    path: &Path,
    signatures: &[MinHashSignature],
    num_hashes: usize,
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut go = || -> std::io::Result<()> {
        for sig in signatures {
            debug_assert_eq!(sig.values.len(), num_hashes);
            w.write_u64::<LittleEndian>(sig.doc_ref)?;
            for &v in &sig.values {
                w.write_u64::<LittleEndian>(v)?;
            }
        }
        w.flush()
    };
    go().map_err(|e| Error::io(path, e))
}

pub fn read_signatures(path: &Path, num_hashes: usize) -> Result<Vec<MinHashSignature>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let total = file.metadata().map_err(|e| Error::io(path, e))?.len();
    let record = 8 * (1 + num_hashes) as u64;
    if total % record != 0 {
        return Err(Error::data(format!(
            "signature file {} has {} bytes, not a multiple of the {}-byte record",
            path.display(),
            total,
            record
        )));
    }
    let mut r = BufReader::new(file);
    let mut out = Vec::with_capacity((total / record) as usize);
    for _ in 0..total / record {
        let doc_ref = r.read_u64::<LittleEndian>().map_err(|e| Error::io(path, e))?;
        let mut values = vec![0u64; num_hashes];
        r.read_u64_into::<LittleEndian>(&mut values)
            .map_err(|e| Error::io(path, e))?;
        out.push(MinHashSignature { doc_ref, values });
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct MetaRecord {
    id: String,
    source: String,
    units: u64,
}

pub fn write_metas(path: &Path, metas: &[DocMeta]) -> Result<()> {
    let records: Vec<MetaRecord> = metas
        .iter()
        .map(|m| MetaRecord {
            id: m.id.clone(),
            source: m.source.clone(),
            units: m.units,
        })
        .collect();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, &records)
        .map_err(|e| Error::data(format!("cannot encode {}: {e}", path.display())))?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_metas(path: &Path) -> Result<Vec<DocMeta>> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| Error::io(path, e))?;
    let records: Vec<MetaRecord> = serde_json::from_str(&text)
        .map_err(|e| Error::data(format!("cannot parse {}: {e}", path.display())))?;
    Ok(records
        .into_iter()
        .map(|r| DocMeta {
            id: r.id,
            source: r.source,
            units: r.units,
        })
        .collect())
}
