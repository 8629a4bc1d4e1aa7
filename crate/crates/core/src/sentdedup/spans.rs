//! Span formation and hashing over eligible sentences.

use super::sentences::Sentence;
use crate::error::{Error, Result};
use md5::{Digest, Md5};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(default, deny_unknown_fields)]
pub struct SpanParams {
    /// Consecutive eligible sentences per span.
    pub span_size: usize,
    /// Sentences below this word count never join a span.
    pub min_sentence_words: usize,
    /// Spans occurring at least this often get their sentences removed.
    pub dup_threshold: u64,
    /// Documents falling below this word count after removal are dropped.
    pub min_doc_words_after: u64,
}

impl Default for SpanParams {
    fn default() -> Self {
        SpanParams {
            span_size: 3,
            min_sentence_words: 5,
            dup_threshold: 3,
            min_doc_words_after: 50,
        }
    }
}

impl SpanParams {
    pub fn validate(&self) -> Result<()> {
        if self.span_size == 0 {
            return Err(Error::config("span_size must be at least 1"));
        }
        if self.min_sentence_words == 0 {
            return Err(Error::config("min_sentence_words must be positive"));
        }
        if self.dup_threshold == 0 {
            return Err(Error::config("dup_threshold must be positive"));
        }
        if self.min_doc_words_after == 0 {
            return Err(Error::config("min_doc_words_after must be positive"));
        }
        Ok(())
    }
}

/// Indices (into the sentence list) of sentences long enough to join spans.
pub fn eligible_indices(sentences: &[Sentence], params: &SpanParams) -> Vec<usize> {
    sentences
        .iter()
        .enumerate()
        .filter(|(_, s)| s.words >= params.min_sentence_words)
        .map(|(i, _)| i)
        .collect()
}

/// MD5 of the normalized span: member sentences joined on single spaces
/// with internal whitespace runs collapsed, so formatting variants of the
/// same boilerplate collide.
pub fn span_hash(sentences: &[&Sentence]) -> u128 {
    let mut hasher = Md5::new();
    let mut first = true;
    for sentence in sentences {
        for word in sentence.text.split_whitespace() {
            if !first {
                hasher.update(b" ");
            }
            hasher.update(word.as_bytes());
            first = false;
        }
    }
    u128::from_le_bytes(hasher.finalize().into())
}

/// Hashes of every window of `span_size` consecutive eligible sentences.
/// Entry w covers eligible positions w .. w+span_size.
pub fn span_signatures(
    sentences: &[Sentence],
    eligible: &[usize],
    params: &SpanParams,
) -> Vec<u128> {
    if eligible.len() < params.span_size {
        return Vec::new();
    }
    eligible
        .windows(params.span_size)
        .map(|window| {
            let members: Vec<&Sentence> = window.iter().map(|&i| &sentences[i]).collect();
            span_hash(&members)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sentdedup::sentences::split_sentences;

    fn eligible_spans(text: &str, params: &SpanParams) -> Vec<u128> {
        let sentences = split_sentences(text);
        let eligible = eligible_indices(&sentences, params);
        span_signatures(&sentences, &eligible, params)
    }

    #[test]
    fn five_eligible_sentences_make_three_spans() {
        let text = "الجملة الأولى فيها خمس كلمات تماما. الجملة الثانية فيها خمس كلمات أيضا. \
                    الجملة الثالثة تحمل خمس كلمات كذلك. الجملة الرابعة تضم خمس كلمات هنا. \
                    الجملة الخامسة تختم بخمس كلمات الآن.";
        let spans = eligible_spans(text, &SpanParams::default());
        assert_eq!(spans.len(), 3);
    }

    #[test]
    fn two_eligible_sentences_make_no_spans() {
        let text = "جملة أولى طويلة من خمس كلمات. جملة ثانية طويلة من خمس كلمات.";
        assert!(eligible_spans(text, &SpanParams::default()).is_empty());
    }

    #[test]
    fn short_sentences_are_excluded_before_windowing() {
        // the two-word interjection must not break the span chain
        let with_short = "الجملة الأولى فيها خمس كلمات. نعم طبعا. \
                          الجملة الثانية فيها خمس كلمات. الجملة الثالثة فيها خمس كلمات.";
        let without = "الجملة الأولى فيها خمس كلمات. \
                       الجملة الثانية فيها خمس كلمات. الجملة الثالثة فيها خمس كلمات.";
        let params = SpanParams::default();
        assert_eq!(eligible_spans(with_short, &params), eligible_spans(without, &params));
        assert_eq!(eligible_spans(with_short, &params).len(), 1);
    }

    #[test]
    fn surrounding_text_does_not_change_span_hash() {
        let core = "العبارة النمطية الأولى تتكرر دائما. العبارة النمطية الثانية تتكرر دائما. \
                    العبارة النمطية الثالثة تتكرر دائما.";
        let a = format!("مقدمة مختلفة تماما عن كل شيء هنا. {core}");
        let b = format!("{core} خاتمة أخرى لا علاقة لها بالمقدمة أبدا.");
        let params = SpanParams::default();
        let spans_a = eligible_spans(&a, &params);
        let spans_b = eligible_spans(&b, &params);
        let common: Vec<&u128> = spans_a.iter().filter(|h| spans_b.contains(h)).collect();
        assert!(!common.is_empty());
        assert_eq!(eligible_spans(core, &params)[0], *common[0]);
    }

    #[test]
    fn whitespace_variants_collide() {
        let tidy = split_sentences("كلمة أولى ثم ثانية ثم ثالثة.");
        let messy = split_sentences("كلمة  أولى\tثم   ثانية ثم ثالثة.");
        assert_eq!(span_hash(&[&tidy[0]]), span_hash(&[&messy[0]]));
    }

    #[test]
    fn zero_span_size_rejected() {
        let params = SpanParams {
            span_size: 0,
            ..SpanParams::default()
        };
        assert_eq!(params.validate().unwrap_err().exit_code(), 1);
    }
}
