//! Thresholds for the Arabic-aware document filters.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Sentence-ending marks recognized on Arabic web text: Latin `.!?`, the
/// Arabic question mark U+061F, curly and angle quotation marks, and the
/// ASCII double quote.
pub const DEFAULT_TERMINAL_PUNCT: &str = ".!?\u{061F}\u{201C}\u{201D}\u{2018}\u{2019}\u{00AB}\u{00BB}\"";

/// Default boilerplate phrases (privacy, cookies, login prompts) in Arabic
/// and English. Fully user-overridable; matching is ASCII-case-insensitive.
pub fn default_policy_phrases() -> Vec<String> {
    [
        // English
        "privacy policy",
        "cookie policy",
        "cookie notice",
        "accept cookies",
        "uses cookies",
        "terms of service",
        "terms of use",
        "all rights reserved",
        "subscribe to our newsletter",
        // Arabic
        "سياسة الخصوصية",
        "ملفات تعريف الارتباط",
        "الكوكيز",
        "تسجيل الدخول",
        "إنشاء حساب",
        "شروط الاستخدام",
        "جميع الحقوق محفوظة",
        "اشترك في النشرة البريدية",
    ]
    .into_iter()
    .map(String::from)
    .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    /// Minimum fraction of lines ending in terminal punctuation; documents
    /// with exactly zero punctuated lines pass when `allow_zero_punct` is set.
    pub min_terminal_punct_ratio: f64,
    pub allow_zero_punct: bool,
    pub max_char_dup_ratio: f64,
    pub max_short_line_ratio: f64,
    pub short_line_max_chars: u64,
    pub max_newlines_per_word: f64,
    pub min_chars: u64,
    pub min_words: u64,
    pub min_arabic_alpha_ratio: f64,
    pub reject_curly: bool,
    pub max_word_chars: u64,
    pub max_bullet_line_ratio: f64,
    pub max_char_run: u64,
    pub policy_phrases: Vec<String>,
    pub terminal_punct: String,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            min_terminal_punct_ratio: 0.05,
            allow_zero_punct: true,
            max_char_dup_ratio: 0.01,
            max_short_line_ratio: 0.67,
            short_line_max_chars: 30,
            max_newlines_per_word: 0.5,
            min_chars: 100,
            min_words: 20,
            min_arabic_alpha_ratio: 0.30,
            reject_curly: true,
            max_word_chars: 100,
            max_bullet_line_ratio: 0.90,
            max_char_run: 20,
            policy_phrases: default_policy_phrases(),
            terminal_punct: DEFAULT_TERMINAL_PUNCT.to_string(),
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("min_terminal_punct_ratio", self.min_terminal_punct_ratio),
            ("max_char_dup_ratio", self.max_char_dup_ratio),
            ("max_short_line_ratio", self.max_short_line_ratio),
            ("min_arabic_alpha_ratio", self.min_arabic_alpha_ratio),
            ("max_bullet_line_ratio", self.max_bullet_line_ratio),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::config(format!("{name} must be in [0,1], got {v}")));
            }
        }
        if self.max_newlines_per_word < 0.0 {
            return Err(Error::config("max_newlines_per_word must be non-negative"));
        }
        for (name, v) in [
            ("short_line_max_chars", self.short_line_max_chars),
            ("min_chars", self.min_chars),
            ("min_words", self.min_words),
            ("max_word_chars", self.max_word_chars),
            ("max_char_run", self.max_char_run),
        ] {
            if v == 0 {
                return Err(Error::config(format!("{name} must be positive")));
            }
        }
        if self.terminal_punct.is_empty() {
            return Err(Error::config("terminal_punct must not be empty"));
        }
        Ok(())
    }

    pub fn is_terminal_punct(&self, c: char) -> bool {
        self.terminal_punct.contains(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        FilterConfig::default().validate().unwrap();
    }

    #[test]
    fn out_of_range_fraction_rejected() {
        let cfg = FilterConfig {
            max_char_dup_ratio: 1.5,
            ..FilterConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn zero_count_rejected() {
        let cfg = FilterConfig {
            min_words: 0,
            ..FilterConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn terminal_punct_includes_arabic_question_mark() {
        let cfg = FilterConfig::default();
        assert!(cfg.is_terminal_punct('؟'));
        assert!(cfg.is_terminal_punct('.'));
        assert!(cfg.is_terminal_punct('»'));
        assert!(!cfg.is_terminal_punct('،'));
    }

    #[test]
    fn login_prompt_is_a_default_policy_phrase() {
        assert!(default_policy_phrases().iter().any(|p| p == "تسجيل الدخول"));
    }
}
