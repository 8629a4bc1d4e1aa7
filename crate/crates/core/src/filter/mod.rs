//! Arabic-aware quality filtering.
//!
//! Two layers: line-level scrubbing removes boilerplate lines inside a
//! document, then document-level checks decide keep/reject with a single
//! reason label per rejection.

mod checks;
mod config;
mod lines;
mod metrics;
mod stage;

pub use checks::{
    check_named, check_registry, evaluate_document, DocumentCheck, FilterVerdict, Reason,
};
pub use config::{default_policy_phrases, FilterConfig, DEFAULT_TERMINAL_PUNCT};
pub use lines::{filter_lines, LineFilter};
pub use metrics::{
    arabic_alpha_ratio, char_duplicate_ratio, contains_ignore_ascii_case, is_arabic_char,
    repetition_flags, terminal_punct_line_ratio, RepetitionFlags,
};
pub use stage::{filter_document, run_filter_stage, FilterOutcome, FilterStats, SourceInput};
