//! Duplicate clusters, representative selection, and consensus records.
//!
//! Candidate pairs are closed into connected components; every component of
//! two or more documents is one duplicate cluster. One representative per
//! cluster survives, chosen by source priority and then by smallest id.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Metadata for one signed document, indexed by its doc_ref ordinal.
#[derive(Debug, Clone)]
pub struct DocMeta {
    pub id: String,
    pub source: String,
    pub units: u64,
}

/// Source preference order: earlier names win. Every source seen in a
/// cluster must be listed; an unlisted source aborts the run rather than
/// silently losing or mis-ranking documents.
pub struct SourcePriority {
    rank: HashMap<String, usize>,
}

impl SourcePriority {
    pub fn new<S: AsRef<str>>(order: &[S]) -> Self {
        let rank = order
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_ref().to_string(), i))
            .collect();
        SourcePriority { rank }
    }

    pub fn rank(&self, source: &str) -> Result<usize> {
        self.rank
            .get(source)
            .copied()
            .ok_or_else(|| Error::UnknownSource(source.to_string()))
    }
}

/// One resolved cluster. `token_units` counts the units carried by the
/// removed members, i.e. what deduplication took out of the corpus.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct DuplicateCluster {
    pub representative_id: String,
    pub member_ids: Vec<String>,
    pub sources: Vec<String>,
    pub token_units: u64,
}

/// Record written for every cluster: the surviving text plus enough
/// context to audit the merge without the removed shards.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConsensusRecord {
    pub text: String,
    pub sources: Vec<String>,
    pub cluster_size: usize,
    pub units: u64,
}

#[derive(Debug, Default)]
pub struct SelectionOutcome {
    /// Representative refs, one per cluster, ascending.
    pub keep: Vec<usize>,
    /// Non-representative refs across all clusters, ascending.
    pub remove: Vec<usize>,
    pub clusters: Vec<DuplicateCluster>,
}

/// Pick a representative for each component and tally what gets removed.
///
/// Within a cluster the member with the highest-priority source wins; ties
/// on source rank fall back to the lexicographically smallest id.
pub fn select_representatives(
    components: &[Vec<usize>],
    metas: &[DocMeta],
    priority: &SourcePriority,
) -> Result<SelectionOutcome> {
    let mut outcome = SelectionOutcome::default();
    for comp in components {
        debug_assert!(comp.len() >= 2);
        let mut best: Option<(usize, &str, usize)> = None;
        for &m in comp {
            let meta = &metas[m];
            let r = priority.rank(&meta.source)?;
            let better = match best {
                None => true,
                Some((br, bid, _)) => r < br || (r == br && meta.id.as_str() < bid),
            };
            if better {
                best = Some((r, meta.id.as_str(), m));
            }
        }
        let rep = best.expect("component has at least two members").2;
        let mut token_units = 0u64;
        for &m in comp {
            if m != rep {
                outcome.remove.push(m);
                token_units += metas[m].units;
            }
        }
        let mut sources: Vec<String> = comp.iter().map(|&m| metas[m].source.clone()).collect();
        sources.sort_unstable();
        sources.dedup();
        outcome.keep.push(rep);
        outcome.clusters.push(DuplicateCluster {
            representative_id: metas[rep].id.clone(),
            member_ids: comp.iter().map(|&m| metas[m].id.clone()).collect(),
            sources,
            token_units,
        });
    }
    outcome.keep.sort_unstable();
    outcome.remove.sort_unstable();
    Ok(outcome)
}
