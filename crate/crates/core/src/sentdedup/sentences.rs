//! Sentence extraction on Arabic and Latin delimiters.
//!
//! A sentence ends at a run of `.` `!` `?` `؟` (the run stays attached) or
//! at a newline. The line index of every sentence is kept so filtered text
//! can be rebuilt on the original line structure.

/// One extracted sentence: trimmed text with its terminal delimiter run,
/// plus where it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub text: String,
    /// Index of the line (newline-separated) the sentence sits on.
    pub line: usize,
    pub words: usize,
}

fn is_delimiter(c: char) -> bool {
    matches!(c, '.' | '!' | '?' | '\u{061F}')
}

/// Split a text into sentences. Whitespace-only segments vanish; segment
/// order follows the text.
pub fn split_sentences(text: &str) -> Vec<Sentence> {
    let mut out = Vec::new();
    for (line_idx, line) in text.split('\n').enumerate() {
        let mut start = 0;
        let mut prev_was_delim = false;
        for (pos, c) in line.char_indices() {
            if prev_was_delim && !is_delimiter(c) {
                push_segment(&mut out, &line[start..pos], line_idx);
                start = pos;
            }
            prev_was_delim = is_delimiter(c);
        }
        push_segment(&mut out, &line[start..], line_idx);
    }
    out
}

fn push_segment(out: &mut Vec<Sentence>, segment: &str, line: usize) {
    let trimmed = segment.trim();
    if trimmed.is_empty() {
        return;
    }
    out.push(Sentence {
        text: trimmed.to_string(),
        line,
        words: trimmed.split_whitespace().count(),
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_on_period_and_arabic_question_mark() {
        let s = split_sentences("جاء الخبر اليوم. وكان مهما جدا للجميع؟ نعم.");
        assert_eq!(s.len(), 3);
        assert_eq!(s[0].text, "جاء الخبر اليوم.");
        assert_eq!(s[1].text, "وكان مهما جدا للجميع؟");
        assert_eq!(s[2].text, "نعم.");
        assert_eq!(s[1].words, 4);
    }

    #[test]
    fn no_punctuation_is_one_sentence() {
        let s = split_sentences("no punctuation here");
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].text, "no punctuation here");
    }

    #[test]
    fn empty_text_has_no_sentences() {
        assert!(split_sentences("").is_empty());
        assert!(split_sentences("   \n  ").is_empty());
    }

    #[test]
    fn delimiter_runs_stay_attached() {
        let s = split_sentences("حقا?! نعم!!! تماما");
        assert_eq!(s.len(), 3);
        assert_eq!(s[0].text, "حقا?!");
        assert_eq!(s[1].text, "نعم!!!");
        assert_eq!(s[2].text, "تماما");
    }

    #[test]
    fn newline_terminates_a_sentence() {
        let s = split_sentences("سطر أول بلا نقطة\nسطر ثان. تكملة");
        assert_eq!(s.len(), 3);
        assert_eq!(s[0].line, 0);
        assert_eq!(s[1].line, 1);
        assert_eq!(s[2].line, 1);
        assert_eq!(s[2].text, "تكملة");
    }

    #[test]
    fn line_indices_skip_blank_lines_correctly(){
        let s = split_sentences("أول\n\nثالث");
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].line, 0);
        assert_eq!(s[1].line, 2);
    }
}
