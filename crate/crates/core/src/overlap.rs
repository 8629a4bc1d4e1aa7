//! Redundancy analytics over consensus records: pairwise source overlap,
//! duplicate-depth distribution, and per-source survival.
//!
//! Two count modes. `Docs` measures clusters in documents: a cluster is
//! one document's worth of shared content and `cluster_size - 1` removed
//! copies. `Units` measures in count units: shared content is the
//! representative text's unit count, removal is the record's `units`
//! field. The matrix always counts shared content once per cluster, so
//! normalizing by the smaller source stays in [0, 1]; the depth histogram
//! counts removal, so depth rows sum to the total removed.

use crate::doc::count_units;
use crate::error::{Error, Result};
use crate::minhash::ConsensusRecord;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMode {
    Docs,
    Units,
}

impl std::str::FromStr for CountMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "docs" => Ok(CountMode::Docs),
            "units" => Ok(CountMode::Units),
            other => Err(Error::config(format!(
                "unknown count mode `{other}` (expected docs or units)"
            ))),
        }
    }
}

/// Shared content of one cluster, counted once.
fn content_magnitude(record: &ConsensusRecord, mode: CountMode) -> u64 {
    match mode {
        CountMode::Docs => 1,
        CountMode::Units => count_units(&record.text).1,
    }
}

/// Removed copies of one cluster.
fn removal_magnitude(record: &ConsensusRecord, mode: CountMode) -> u64 {
    match mode {
        CountMode::Docs => record.cluster_size.saturating_sub(1) as u64,
        CountMode::Units => record.units,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OverlapMatrix {
    pub sources: Vec<String>,
    /// shared[i][j]: content present in both source i and source j.
    pub shared: Vec<Vec<u64>>,
    /// shared ÷ min(total of i, total of j); 0 when either total is 0.
    pub normalized: Vec<Vec<f64>>,
}

impl OverlapMatrix {
    pub fn cell(&self, a: &str, b: &str) -> Option<u64> {
        let i = self.sources.iter().position(|s| s == a)?;
        let j = self.sources.iter().position(|s| s == b)?;
        Some(self.shared[i][j])
    }

    pub fn to_csv(&self, normalized: bool) -> String {
        let mut out = String::from("source");
        for s in &self.sources {
            let _ = write!(out, ",{s}");
        }
        out.push('\n');
        for (i, s) in self.sources.iter().enumerate() {
            out.push_str(s);
            for j in 0..self.sources.len() {
                if normalized {
                    let _ = write!(out, ",{:.6}", self.normalized[i][j]);
                } else {
                    let _ = write!(out, ",{}", self.shared[i][j]);
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Build the pairwise overlap matrix. `totals` are per-source corpus
/// totals (documents or units per `mode`) measured before dedup; every
/// source named by a record must be present.
pub fn pairwise_overlap(
    records: &[ConsensusRecord],
    totals: &BTreeMap<String, u64>,
    mode: CountMode,
) -> Result<OverlapMatrix> {
    let sources: Vec<String> = totals.keys().cloned().collect();
    let index: BTreeMap<&str, usize> = sources
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let n = sources.len();
    let mut shared = vec![vec![0u64; n]; n];
    for record in records {
        let m = content_magnitude(record, mode);
        let mut members: Vec<usize> = Vec::with_capacity(record.sources.len());
        for s in &record.sources {
            let Some(&i) = index.get(s.as_str()) else {
                return Err(Error::data(format!(
                    "consensus source `{s}` missing from totals"
                )));
            };
            members.push(i);
        }
        members.sort_unstable();
        members.dedup();
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a..] {
                shared[i][j] += m;
                if i != j {
                    shared[j][i] += m;
                }
            }
        }
    }
    let normalized = shared
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, &cell)| {
                    let denom = totals[&sources[i]].min(totals[&sources[j]]);
                    if denom == 0 {
                        0.0
                    } else {
                        cell as f64 / denom as f64
                    }
                })
                .collect()
        })
        .collect();
    Ok(OverlapMatrix {
        sources,
        shared,
        normalized,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DepthRow {
    /// Number of sources the cluster spans. Depth 1 means duplicates
    /// confined to a single source.
    pub depth: usize,
    pub clusters: u64,
    pub units: u64,
    pub percent: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct DepthHistogram {
    pub rows: Vec<DepthRow>,
}

impl DepthHistogram {
    pub fn total_units(&self) -> u64 {
        self.rows.iter().map(|r| r.units).sum()
    }
}

/// Aggregate clusters by how many sources contain them. Units count the
/// removed copies, so the histogram accounts for all deduplicated content.
pub fn depth_histogram(records: &[ConsensusRecord], mode: CountMode) -> DepthHistogram {
    let mut clusters: BTreeMap<usize, u64> = BTreeMap::new();
    let mut units: BTreeMap<usize, u64> = BTreeMap::new();
    for record in records {
        let depth = record.sources.len();
        *clusters.entry(depth).or_insert(0) += 1;
        *units.entry(depth).or_insert(0) += removal_magnitude(record, mode);
    }
    let total: u64 = units.values().sum();
    let rows = clusters
        .into_iter()
        .map(|(depth, n)| DepthRow {
            depth,
            clusters: n,
            units: units[&depth],
            percent: if total == 0 {
                0.0
            } else {
                units[&depth] as f64 / total as f64 * 100.0
            },
        })
        .collect();
    DepthHistogram { rows }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SurvivalRow {
    pub source: String,
    pub before: u64,
    pub after: u64,
    pub survival: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct SurvivalTable {
    pub rows: Vec<SurvivalRow>,
}

/// Per-source document survival through dedup. An empty source surviving
/// as empty counts as full survival.
pub fn survival_rates(
    pre: &BTreeMap<String, u64>,
    post: &BTreeMap<String, u64>,
) -> Result<SurvivalTable> {
    let mut sources: Vec<&String> = pre.keys().chain(post.keys()).collect();
    sources.sort();
    sources.dedup();
    let mut rows = Vec::with_capacity(sources.len());
    for source in sources {
        let before = pre.get(source).copied().unwrap_or(0);
        let after = post.get(source).copied().unwrap_or(0);
        if before == 0 && after > 0 {
            return Err(Error::data(format!(
                "source `{source}`: {after} documents after dedup but none before"
            )));
        }
        if after > before {
            return Err(Error::data(format!(
                "source `{source}`: {after} documents after dedup exceeds {before} before"
            )));
        }
        let survival = if before == 0 {
            1.0
        } else {
            after as f64 / before as f64
        };
        rows.push(SurvivalRow {
            source: source.clone(),
            before,
            after,
            survival,
        });
    }
    Ok(SurvivalTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(sources: &[&str], cluster_size: usize, units: u64, words: usize) -> ConsensusRecord {
        ConsensusRecord {
            text: vec!["كلمة"; words].join(" "),
            sources: sources.iter().map(|s| s.to_string()).collect(),
            cluster_size,
            units,
        }
    }

    fn totals(pairs: &[(&str, u64)]) -> BTreeMap<String, u64> {
        pairs.iter().map(|(s, n)| (s.to_string(), *n)).collect()
    }

    #[test]
    fn single_pair_cluster_in_units_mode() {
        let records = [record(&["a", "b"], 2, 100, 100)];
        let matrix = pairwise_overlap(
            &records,
            &totals(&[("a", 200), ("b", 400)]),
            CountMode::Units,
        )
        .unwrap();
        assert_eq!(matrix.cell("a", "b"), Some(100));
        assert_eq!(matrix.cell("b", "a"), Some(100));
        let i = 0;
        let j = 1;
        assert!((matrix.normalized[i][j] - 0.5).abs() < 1e-12);
        assert_eq!(matrix.shared[0][0], 100);
        assert_eq!(matrix.shared[1][1], 100);
    }

    #[test]
    fn empty_records_give_zero_matrix() {
        let matrix =
            pairwise_overlap(&[], &totals(&[("a", 10), ("b", 10)]), CountMode::Docs).unwrap();
        assert_eq!(matrix.shared, vec![vec![0, 0], vec![0, 0]]);
    }

    #[test]
    fn triple_cluster_reaches_every_pair_in_full() {
        let records = [
            record(&["a", "b"], 2, 50, 50),
            record(&["a", "b", "c"], 3, 120, 60),
        ];
        let t = totals(&[("a", 1000), ("b", 1000), ("c", 1000)]);
        let matrix = pairwise_overlap(&records, &t, CountMode::Docs).unwrap();
        assert_eq!(matrix.cell("a", "b"), Some(2));
        assert_eq!(matrix.cell("a", "c"), Some(1));
        assert_eq!(matrix.cell("b", "c"), Some(1));
        assert_eq!(matrix.cell("a", "a"), Some(2));
        assert_eq!(matrix.cell("c", "c"), Some(1));
        // symmetry over all cells
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(matrix.shared[i][j], matrix.shared[j][i]);
                assert!((0.0..=1.0).contains(&matrix.normalized[i][j]));
            }
        }
    }

    #[test]
    fn unknown_source_in_record_is_data_error() {
        let records = [record(&["a", "x"], 2, 10, 10)];
        let err =
            pairwise_overlap(&records, &totals(&[("a", 10)]), CountMode::Docs).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains('x'));
    }

    #[test]
    fn histogram_counts_clusters_and_removed_units() {
        let records = [
            record(&["a", "b"], 2, 90, 90),
            record(&["a", "b", "c"], 3, 200, 100),
            record(&["a", "b"], 2, 110, 110),
        ];
        let h = depth_histogram(&records, CountMode::Units);
        assert_eq!(h.rows.len(), 2);
        assert_eq!(h.rows[0].depth, 2);
        assert_eq!(h.rows[0].clusters, 2);
        assert_eq!(h.rows[0].units, 200);
        assert_eq!(h.rows[1].depth, 3);
        assert_eq!(h.rows[1].clusters, 1);
        assert_eq!(h.rows[1].units, 200);
        assert!((h.rows[0].percent - 50.0).abs() < 1e-12);
        // conservation: depth rows account for every removed unit
        assert_eq!(h.total_units(), records.iter().map(|r| r.units).sum::<u64>());
    }

    #[test]
    fn histogram_docs_mode_counts_removed_copies() {
        let records = [record(&["a", "b"], 2, 0, 10), record(&["a", "b", "c"], 4, 0, 10)];
        let h = depth_histogram(&records, CountMode::Docs);
        assert_eq!(h.rows[0].units, 1);
        assert_eq!(h.rows[1].units, 3);
    }

    #[test]
    fn survival_identity_and_reference_point() {
        let table = survival_rates(
            &totals(&[("finepdfs", 680_000), ("web", 500)]),
            &totals(&[("finepdfs", 670_000), ("web", 500)]),
        )
        .unwrap();
        assert_eq!(table.rows[1].source, "web");
        assert!((table.rows[1].survival - 1.0).abs() < 1e-12);
        assert!((table.rows[0].survival * 100.0 - 98.5).abs() < 0.05);
    }

    #[test]
    fn impossible_accounting_is_rejected() {
        let err = survival_rates(&totals(&[("a", 0)]), &totals(&[("a", 5)])).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = survival_rates(&totals(&[("a", 3)]), &totals(&[("a", 5)])).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn empty_source_survives_fully() {
        let table = survival_rates(&totals(&[("a", 0)]), &totals(&[("a", 0)])).unwrap();
        assert!((table.rows[0].survival - 1.0).abs() < 1e-12);
    }

    #[test]
    fn csv_is_stable_and_labeled() {
        let records = [record(&["a", "b"], 2, 10, 10)];
        let t = totals(&[("a", 20), ("b", 40)]);
        let matrix = pairwise_overlap(&records, &t, CountMode::Docs).unwrap();
        let csv = matrix.to_csv(false);
        assert_eq!(csv, "source,a,b\na,1,1\nb,1,1\n");
        let norm = matrix.to_csv(true);
        assert!(norm.starts_with("source,a,b\n"));
        assert!(norm.contains("0.050000"));
        assert_eq!(matrix.to_csv(true), norm);
    }
}
