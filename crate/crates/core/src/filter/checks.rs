//! Document-level checks behind a common trait, registered by reason label.
//!
//! The registry fixes the evaluation order so rejection tallies are
//! deterministic and comparable across runs. Check membership is
//! order-independent: reordering changes which label a document gets,
//! never whether it is kept.

use super::config::FilterConfig;
use super::metrics;
use crate::doc::Document;
use serde::{Deserialize, Serialize};

/// Rejection reason vocabulary; one tally row per reason.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    CharDupRatio,
    ExcessiveRepetition,
    CurlyBrackets,
    ShortLineRatio,
    TerminalPunctRatio,
    TooShortChars,
    TooFewWords,
    BulletRatio,
    EmptyAfterLineFilter,
    LowArabicRatio,
    LoremIpsum,
    NoAlpha,
    NewlineRatio,
}

impl Reason {
    pub const ALL: [Reason; 13] = [
        Reason::CharDupRatio,
        Reason::ExcessiveRepetition,
        Reason::CurlyBrackets,
        Reason::ShortLineRatio,
        Reason::TerminalPunctRatio,
        Reason::TooShortChars,
        Reason::TooFewWords,
        Reason::BulletRatio,
        Reason::EmptyAfterLineFilter,
        Reason::LowArabicRatio,
        Reason::LoremIpsum,
        Reason::NoAlpha,
        Reason::NewlineRatio,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Reason::CharDupRatio => "char_dup_ratio",
            Reason::ExcessiveRepetition => "excessive_repetition",
            Reason::CurlyBrackets => "curly_brackets",
            Reason::ShortLineRatio => "short_line_ratio",
            Reason::TerminalPunctRatio => "terminal_punct_ratio",
            Reason::TooShortChars => "too_short_chars",
            Reason::TooFewWords => "too_few_words",
            Reason::BulletRatio => "bullet_ratio",
            Reason::EmptyAfterLineFilter => "empty_after_line_filter",
            Reason::LowArabicRatio => "low_arabic_ratio",
            Reason::LoremIpsum => "lorem_ipsum",
            Reason::NoAlpha => "no_alpha",
            Reason::NewlineRatio => "newline_ratio",
        }
    }
}

impl std::fmt::Display for Reason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Keep/reject decision with the single reason when rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterVerdict {
    pub kept: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<Reason>,
}

impl FilterVerdict {
    pub fn kept() -> Self {
        FilterVerdict {
            kept: true,
            reason: None,
        }
    }

    pub fn rejected(reason: Reason) -> Self {
        FilterVerdict {
            kept: false,
            reason: Some(reason),
        }
    }
}

/// One document-level check. Implementations must be pure functions of the
/// document and config so the stage can run them in parallel.
pub trait DocumentCheck: Sync {
    fn reason(&self) -> Reason;
    fn name(&self) -> &'static str {
        self.reason().label()
    }
    /// True when the document violates this check.
    fn fails(&self, doc: &Document, cfg: &FilterConfig) -> bool;
}

struct EmptyAfterLineFilter;
impl DocumentCheck for EmptyAfterLineFilter {
    fn reason(&self) -> Reason {
        Reason::EmptyAfterLineFilter
    }
    fn fails(&self, doc: &Document, _cfg: &FilterConfig) -> bool {
        doc.text.trim().is_empty()
    }
}

struct NoAlpha;
impl DocumentCheck for NoAlpha {
    fn reason(&self) -> Reason {
        Reason::NoAlpha
    }
    fn fails(&self, doc: &Document, _cfg: &FilterConfig) -> bool {
        !doc.text.chars().any(|c| c.is_alphabetic())
    }
}

struct LoremIpsum;
impl DocumentCheck for LoremIpsum {
    fn reason(&self) -> Reason {
        Reason::LoremIpsum
    }
    fn fails(&self, doc: &Document, _cfg: &FilterConfig) -> bool {
        metrics::contains_lorem_ipsum(&doc.text)
    }
}

struct CurlyBrackets;
impl DocumentCheck for CurlyBrackets {
    fn reason(&self) -> Reason {
        Reason::CurlyBrackets
    }
    fn fails(&self, doc: &Document, cfg: &FilterConfig) -> bool {
        cfg.reject_curly && doc.text.contains('{')
    }
}

struct TooShortChars;
impl DocumentCheck for TooShortChars {
    fn reason(&self) -> Reason {
        Reason::TooShortChars
    }
    fn fails(&self, doc: &Document, cfg: &FilterConfig) -> bool {
        doc.char_count < cfg.min_chars
    }
}

struct TooFewWords;
impl DocumentCheck for TooFewWords {
    fn reason(&self) -> Reason {
        Reason::TooFewWords
    }
    fn fails(&self, doc: &Document, cfg: &FilterConfig) -> bool {
        doc.word_count < cfg.min_words
    }
}

struct LowArabicRatio;
impl DocumentCheck for LowArabicRatio {
    fn reason(&self) -> Reason {
        Reason::LowArabicRatio
    }
    fn fails(&self, doc: &Document, cfg: &FilterConfig) -> bool {
        metrics::arabic_alpha_ratio(&doc.text) < cfg.min_arabic_alpha_ratio
    }
}

struct CharDupRatio;
impl DocumentCheck for CharDupRatio {
    fn reason(&self) -> Reason {
        Reason::CharDupRatio
    }
    fn fails(&self, doc: &Document, cfg: &FilterConfig) -> bool {
        metrics::char_duplicate_ratio(&doc.text) > cfg.max_char_dup_ratio
    }
}

struct ExcessiveRepetition;
impl DocumentCheck for ExcessiveRepetition {
    fn reason(&self) -> Reason {
        Reason::ExcessiveRepetition
    }
    fn fails(&self, doc: &Document, cfg: &FilterConfig) -> bool {
        metrics::repetition_flags(&doc.text, cfg).excessive_repetition
    }
}

struct TerminalPunctRatio;
impl DocumentCheck for TerminalPunctRatio {
    fn reason(&self) -> Reason {
        Reason::TerminalPunctRatio
    }
    fn fails(&self, doc: &Document, cfg: &FilterConfig) -> bool {
        let ratio = metrics::terminal_punct_line_ratio(&doc.text, cfg);
        if ratio == 0.0 {
            // Arabic web text often omits punctuation entirely
            !cfg.allow_zero_punct
        } else {
            ratio < cfg.min_terminal_punct_ratio
        }
    }
}

struct ShortLineRatio;
impl DocumentCheck for ShortLineRatio {
    fn reason(&self) -> Reason {
        Reason::ShortLineRatio
    }
    fn fails(&self, doc: &Document, cfg: &FilterConfig) -> bool {
        let mut lines = 0usize;
        let mut short = 0usize;
        for line in doc.text.split('\n') {
            if line.trim().is_empty() {
                continue;
            }
            lines += 1;
            if line.chars().count() as u64 <= cfg.short_line_max_chars {
                short += 1;
            }
        }
        lines > 0 && short as f64 / lines as f64 > cfg.max_short_line_ratio
    }
}

const BULLET_CHARS: [char; 5] = ['•', '-', '*', '▪', '◦'];

struct BulletRatio;
impl DocumentCheck for BulletRatio {
    fn reason(&self) -> Reason {
        Reason::BulletRatio
    }
    fn fails(&self, doc: &Document, cfg: &FilterConfig) -> bool {
        let mut lines = 0usize;
        let mut bullets = 0usize;
        for line in doc.text.split('\n') {
            let trimmed = line.trim_start();
            if trimmed.is_empty() {
                continue;
            }
            lines += 1;
            if trimmed.starts_with(BULLET_CHARS) {
                bullets += 1;
            }
        }
        lines > 0 && bullets as f64 / lines as f64 > cfg.max_bullet_line_ratio
    }
}

struct NewlineRatio;
impl DocumentCheck for NewlineRatio {
    fn reason(&self) -> Reason {
        Reason::NewlineRatio
    }
    fn fails(&self, doc: &Document, cfg: &FilterConfig) -> bool {
        if doc.word_count == 0 {
            return false; // handled by earlier checks
        }
        let newlines = doc.text.bytes().filter(|&b| b == b'\n').count();
        newlines as f64 / doc.word_count as f64 > cfg.max_newlines_per_word
    }
}

/// Canonical check order. The first failing check names the reason.
static CHECK_ORDER: [&dyn DocumentCheck; 13] = [
    &EmptyAfterLineFilter,
    &NoAlpha,
    &LoremIpsum,
    &CurlyBrackets,
    &TooShortChars,
    &TooFewWords,
    &LowArabicRatio,
    &CharDupRatio,
    &ExcessiveRepetition,
    &TerminalPunctRatio,
    &ShortLineRatio,
    &BulletRatio,
    &NewlineRatio,
];

pub fn check_registry() -> &'static [&'static dyn DocumentCheck] {
    &CHECK_ORDER
}

/// Look up a check by its reason label.
pub fn check_named(name: &str) -> Option<&'static dyn DocumentCheck> {
    CHECK_ORDER.iter().find(|c| c.name() == name).copied()
}

/// Evaluate a (line-scrubbed) document against every check in canonical
/// order; the first failure decides the verdict.
pub fn evaluate_document(doc: &Document, cfg: &FilterConfig) -> FilterVerdict {
    for check in CHECK_ORDER.iter() {
        if check.fails(doc, cfg) {
            return FilterVerdict::rejected(check.reason());
        }
    }
    FilterVerdict::kept()
}
