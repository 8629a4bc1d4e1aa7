//! Character and word shingling over normalized text.

use super::params::{MinHashParams, ShingleMode};
use crate::error::{Error, Result};
use xxhash_rust::xxh3::xxh3_64;

/// Shingle hashes as a sorted, deduplicated set.
pub type ShingleSet = Vec<u64>;

/// Lowercase and collapse whitespace runs to single spaces, trimming the
/// ends, so shingling is robust to formatting noise.
pub fn normalize(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    for c in text.chars() {
        if c.is_whitespace() {
            pending_space = !out.is_empty();
        } else {
            if pending_space {
                out.push(' ');
                pending_space = false;
            }
            if c.is_uppercase() {
                for lc in c.to_lowercase() {
                    out.push(lc);
                }
            } else {
                out.push(c);
            }
        }
    }
    out
}

/// Hash every contiguous `shingle_len`-character (or -word) window of the
/// normalized text. Texts shorter than one window yield a single hash of
/// the whole normalized text, so the set is never empty.
pub fn shingle(text: &str, params: &MinHashParams) -> ShingleSet {
    let norm = normalize(text);
    let mut hashes = match params.shingle_mode {
        ShingleMode::Chars => char_windows(&norm, params.shingle_len),
        ShingleMode::Words => word_windows(&norm, params.shingle_len),
    };
    if hashes.is_empty() {
        hashes.push(xxh3_64(norm.as_bytes()));
    }
    hashes.sort_unstable();
    hashes.dedup();
    hashes
}

fn char_windows(norm: &str, len: usize) -> Vec<u64> {
    // byte offset of every char boundary, plus the end
    let mut offsets: Vec<usize> = norm.char_indices().map(|(i, _)| i).collect();
    offsets.push(norm.len());
    let n_chars = offsets.len() - 1;
    if n_chars < len {
        return Vec::new();
    }
    let bytes = norm.as_bytes();
    (0..=n_chars - len)
        .map(|i| xxh3_64(&bytes[offsets[i]..offsets[i + len]]))
        .collect()
}

fn word_windows(norm: &str, len: usize) -> Vec<u64> {
    // normalized text separates words by single spaces
    let mut starts: Vec<usize> = Vec::new();
    let mut ends: Vec<usize> = Vec::new();
    let mut in_word = false;
    for (i, b) in norm.bytes().enumerate() {
        if b == b' ' {
            if in_word {
                ends.push(i);
                in_word = false;
            }
        } else if !in_word {
            starts.push(i);
            in_word = true;
        }
    }
    if in_word {
        ends.push(norm.len());
    }
    if starts.len() < len {
        return Vec::new();
    }
    let bytes = norm.as_bytes();
    (0..=starts.len() - len)
        .map(|i| xxh3_64(&bytes[starts[i]..ends[i + len - 1]]))
        .collect()
}

/// Jaccard similarity |A∩B| / |A∪B| of two shingle sets (test oracle for
/// the MinHash properties). Errors when both sets are empty.
pub fn jaccard(a: &ShingleSet, b: &ShingleSet) -> Result<f64> {
    if a.is_empty() && b.is_empty() {
        return Err(Error::data("jaccard of two empty sets is undefined"));
    }
    let mut i = 0;
    let mut j = 0;
    let mut intersection = 0usize;
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                intersection += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - intersection;
    Ok(intersection as f64 / union as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> MinHashParams {
        MinHashParams::default()
    }

    #[test]
    fn two_windows_from_six_chars() {
        assert_eq!(shingle("abcdef", &params()).len(), 2);
    }

    #[test]
    fn short_text_falls_back_to_whole_text_hash() {
        let s = shingle("abc", &params());
        assert_eq!(s.len(), 1);
        assert_eq!(s[0], xxh3_64(b"abc"));
    }

    #[test]
    fn repeated_windows_dedupe() {
        // "aaaaaa" has two identical "aaaaa" windows
        assert_eq!(shingle("aaaaaa", &params()).len(), 1);
    }

    #[test]
    fn empty_text_still_yields_one_hash() {
        assert_eq!(shingle("", &params()).len(), 1);
    }

    #[test]
    fn normalization_collapses_whitespace_and_case() {
        assert_eq!(normalize("  Abc\n\tDEF  "), "abc def");
        assert_eq!(shingle("Abc  DEF", &params()), shingle("abc def", &params()));
    }

    #[test]
    fn arabic_text_shingles_on_chars_not_bytes() {
        // 6 Arabic chars -> 2 windows of 5
        assert_eq!(shingle("مرحبال", &params()).len(), 2);
    }

    #[test]
    fn word_mode_windows() {
        let p = MinHashParams {
            shingle_mode: ShingleMode::Words,
            shingle_len: 2,
            ..params()
        };
        // 3 words -> 2 bigrams
        assert_eq!(shingle("alpha beta gamma", &p).len(), 2);
        // fewer words than the window -> whole-text fallback
        assert_eq!(shingle("alpha", &p).len(), 1);
    }

    #[test]
    fn jaccard_basics() {
        let a = vec![1, 2, 3];
        let b = vec![2, 3, 4];
        assert!((jaccard(&a, &b).unwrap() - 0.5).abs() < 1e-12);
        assert!((jaccard(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        assert!(jaccard(&vec![], &vec![]).is_err());
    }

    #[test]
    fn jaccard_of_near_identical_texts() {
        // shingles {abcde, bcdef} vs {abcde, bcdeg}: 1 shared of 3 total
        let a = shingle("abcdef", &params());
        let b = shingle("abcdeg", &params());
        assert!((jaccard(&a, &b).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }
}
