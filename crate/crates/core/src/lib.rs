//! Shard-parallel curation pipeline for Arabic web corpora.
//!
//! Three stages over newline-delimited JSON shards, plus redundancy
//! analytics:
//!
//! - **quality filtering** (`filter`): Arabic-aware line scrubbing and
//!   document checks with per-reason accounting
//! - **MinHash deduplication** (`minhash`): near-duplicate detection across
//!   sources via LSH banding, union-find clustering, and source-priority
//!   representative selection
//! - **sentence dedup** (`sentdedup`): two-phase removal of repeated
//!   3-sentence boilerplate spans
//! - **overlap analytics** (`overlap`): pairwise source overlap, duplicate
//!   depth, survival rates
//!
//! The `pipeline` module wires the stages together behind a single config
//! and emits stage-by-stage reports.

pub mod doc;
pub mod error;
pub mod filter;
pub mod io;
pub mod minhash;
pub mod overlap;
pub mod pipeline;
pub mod sentdedup;
#[cfg(test)]
pub(crate) mod testutil;

pub use doc::{count_units, Document, UnitMode};
pub use error::{Error, Result};
