//! Cross-source near-duplicate detection with MinHash LSH.

mod cluster;
mod lsh;
mod params;
mod shingle;
mod sigio;
mod signature;
mod stage;
mod union_find;

pub use cluster::{
    select_representatives, ConsensusRecord, DocMeta, DuplicateCluster, SelectionOutcome,
    SourcePriority,
};
pub use lsh::candidate_pairs;
pub use params::{MinHashParams, ShingleMode};
pub use shingle::{jaccard, normalize, shingle, ShingleSet};
pub use sigio::{read_metas, read_signatures, write_metas, write_signatures};
pub use signature::{agreement, signature, HashFamily, MinHashSignature};
pub use stage::{read_consensus, run_minhash_stage, write_consensus, MinhashOutcome, MinhashStats};
pub use union_find::UnionFind;
