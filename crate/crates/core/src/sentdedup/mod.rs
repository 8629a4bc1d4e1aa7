//! Sentence-span boilerplate removal across the corpus.

mod sentences;
mod spans;
mod stage;
mod store;

pub use sentences::{split_sentences, Sentence};
pub use spans::{eligible_indices, span_hash, span_signatures, SpanParams};
pub use stage::{
    apply_span_filter, run_filter_phase, run_sentdedup_stage, run_sign_phase, Phase,
    SentDedupOutcome, SentDedupStats,
};
pub use store::{merge_stores, SpanCountStore, StoreBuilder};
