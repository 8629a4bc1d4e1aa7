//! Per-document text measurements behind the filter checks.

use super::config::FilterConfig;
use aho_corasick::AhoCorasick;
use std::collections::HashSet;
use std::sync::LazyLock;

static LOREM: LazyLock<AhoCorasick> = LazyLock::new(|| {
    AhoCorasick::builder()
        .ascii_case_insensitive(true)
        .build(["lorem ipsum"])
        .expect("pattern compiles")
});

/// Arabic script ranges: base blocks plus presentation forms seen in web text.
pub fn is_arabic_char(c: char) -> bool {
    matches!(c,
        '\u{0600}'..='\u{06FF}'
        | '\u{0750}'..='\u{077F}'
        | '\u{08A0}'..='\u{08FF}'
        | '\u{FB50}'..='\u{FDFF}'
        | '\u{FE70}'..='\u{FEFF}')
}

/// ASCII-case-insensitive substring search; Arabic text has no case so this
/// covers the mixed Arabic/English phrase lists without allocation.
pub fn contains_ignore_ascii_case(haystack: &str, needle: &str) -> bool {
    let h = haystack.as_bytes();
    let n = needle.as_bytes();
    if n.is_empty() {
        return true;
    }
    if h.len() < n.len() {
        return false;
    }
    h.windows(n.len()).any(|w| w.eq_ignore_ascii_case(n))
}

/// Memchr-prefiltered "lorem ipsum" probe; on Arabic text the prefilter
/// rejects in one pass over the bytes.
pub fn contains_lorem_ipsum(text: &str) -> bool {
    LOREM.is_match(text)
}

/// Fraction of characters sitting in repeated line occurrences beyond each
/// line's first, over all non-newline characters. 0 for empty text.
pub fn char_duplicate_ratio(text: &str) -> f64 {
    if text.is_empty() {
        return 0.0;
    }
    let mut seen: HashSet<&str> = HashSet::new();
    let mut dup_chars = 0usize;
    let mut total_chars = 0usize;
    for line in text.split('\n') {
        let len = line.chars().count();
        total_chars += len;
        if !seen.insert(line) {
            dup_chars += len;
        }
    }
    if total_chars == 0 {
        0.0
    } else {
        dup_chars as f64 / total_chars as f64
    }
}

/// Fraction of non-empty lines whose last non-whitespace character is a
/// terminal punctuation mark.
pub fn terminal_punct_line_ratio(text: &str, cfg: &FilterConfig) -> f64 {
    let mut lines = 0usize;
    let mut punctuated = 0usize;
    for line in text.split('\n') {
        let trimmed = line.trim_end();
        match trimmed.chars().next_back() {
            None => continue, // blank line
            Some(last) => {
                lines += 1;
                if cfg.is_terminal_punct(last) {
                    punctuated += 1;
                }
            }
        }
    }
    if lines == 0 {
        0.0
    } else {
        punctuated as f64 / lines as f64
    }
}

/// Arabic-script share of alphabetic characters; 0 when the text has no
/// alphabetic characters at all.
pub fn arabic_alpha_ratio(text: &str) -> f64 {
    let mut alpha = 0usize;
    let mut arabic = 0usize;
    for c in text.chars() {
        // U+0621..=U+064A (hamza, letters, tatweel) is entirely alphabetic;
        // skip the general unicode class lookup for the dominant case.
        if ('\u{0621}'..='\u{064A}').contains(&c) {
            alpha += 1;
            arabic += 1;
        } else if c.is_alphabetic() {
            alpha += 1;
            if is_arabic_char(c) {
                arabic += 1;
            }
        }
    }
    if alpha == 0 {
        0.0
    } else {
        arabic as f64 / alpha as f64
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RepetitionFlags {
    pub excessive_repetition: bool,
    pub lorem_ipsum: bool,
    pub no_alpha: bool,
}

/// Repetition and degenerate-content flags.
///
/// `excessive_repetition` fires on a single-character run longer than
/// `max_char_run` or a 2-4 character pattern repeating consecutively more
/// than `max_char_run / 2` times (extended laughter, repeated punctuation).
pub fn repetition_flags(text: &str, cfg: &FilterConfig) -> RepetitionFlags {
    RepetitionFlags {
        excessive_repetition: has_excessive_repetition(text, cfg),
        lorem_ipsum: contains_lorem_ipsum(text),
        no_alpha: !text.chars().any(|c| c.is_alphabetic()),
    }
}

fn has_excessive_repetition(text: &str, cfg: &FilterConfig) -> bool {
    let max_run = cfg.max_char_run as usize;
    let max_pattern_repeats = max_run / 2;

    // Single pass with a four-char lookback ring. A run is a stretch of
    // chars[i] == chars[i - 1]; a maximal stretch of chars[i] == chars[i - L]
    // of length m covers (m / L) + 1 consecutive repeats of an L-char pattern.
    let mut ring = ['\0'; 4];
    let mut n = 0usize;
    let mut run = 1usize;
    let mut stretch = [0usize; 3];
    for c in text.chars() {
        if n > 0 {
            if c == ring[(n - 1) & 3] {
                run += 1;
                if run > max_run {
                    return true;
                }
            } else {
                run = 1;
            }
        }
        for period in 2..=4usize {
            if n < period {
                continue;
            }
            let slot = period - 2;
            if c == ring[(n - period) & 3] {
                stretch[slot] += 1;
                if stretch[slot] / period + 1 > max_pattern_repeats {
                    return true;
                }
            } else {
                stretch[slot] = 0;
            }
        }
        ring[n & 3] = c;
        n += 1;
    }
    false
}
