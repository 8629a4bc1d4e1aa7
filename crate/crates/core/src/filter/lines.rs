//! Line-level scrubbing: individual lines are removed, not entire documents.

use super::config::FilterConfig;
use crate::doc::Document;
use aho_corasick::AhoCorasick;
use regex::Regex;
use std::sync::LazyLock;

// Wikipedia-style citation markers: [1], [23], [edit]
static CITATION_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\[(?:\d+|edit)\]").unwrap());

/// Line rules in compiled form; build once per stage, apply per document.
pub struct LineFilter {
    /// "javascript" plus the policy phrases, one pass per line.
    phrases: AhoCorasick,
    max_word_chars: usize,
    terminal_punct: String,
}

impl LineFilter {
    pub fn new(cfg: &FilterConfig) -> Self {
        let mut patterns = vec!["javascript"];
        patterns.extend(
            cfg.policy_phrases
                .iter()
                .map(String::as_str)
                .filter(|p| !p.is_empty()),
        );
        let phrases = AhoCorasick::builder()
            .ascii_case_insensitive(true)
            .build(&patterns)
            .expect("phrase patterns compile");
        LineFilter {
            phrases,
            max_word_chars: cfg.max_word_chars as usize,
            terminal_punct: cfg.terminal_punct.clone(),
        }
    }

    /// A line is dropped when any rule holds: an over-long word (URLs,
    /// encoded data), "javascript", a policy phrase, fewer than 2 words
    /// without terminal punctuation, or a citation marker.
    pub fn drops_line(&self, line: &str) -> bool {
        let mut words = 0usize;
        for word in line.split_whitespace() {
            words += 1;
            // byte length bounds char count, so most words skip the count
            if word.len() > self.max_word_chars && word.chars().count() > self.max_word_chars {
                return true;
            }
        }
        if words < 2 {
            let punctuated = line
                .trim_end()
                .chars()
                .next_back()
                .is_some_and(|c| self.terminal_punct.contains(c));
            if !punctuated {
                return true;
            }
        }
        self.phrases.is_match(line) || CITATION_RE.is_match(line)
    }

    /// Scrub a document, returning the surviving text and the number of
    /// removed lines. Counts are recomputed by the caller via `set_text`.
    pub fn scrub(&self, text: &str) -> (String, u64) {
        if text.is_empty() {
            return (String::new(), 0);
        }
        let mut kept: Vec<&str> = Vec::new();
        let mut removed = 0u64;
        for line in text.split('\n') {
            if self.drops_line(line) {
                removed += 1;
            } else {
                kept.push(line);
            }
        }
        if removed == 0 {
            (text.to_string(), 0)
        } else {
            (kept.join("\n"), removed)
        }
    }
}

/// Apply the line rules to one document.
pub fn filter_lines(doc: &Document, cfg: &FilterConfig) -> (Document, u64) {
    let filter = LineFilter::new(cfg);
    let (text, removed) = filter.scrub(&doc.text);
    let mut out = doc.clone();
    if removed > 0 {
        out.set_text(text);
    }
    (out, removed)
}
