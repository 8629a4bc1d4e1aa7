//! The document record that flows through every pipeline stage.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;

/// One text record with a stable id, source-corpus tag, and counts derived
/// from the text. Counts are always recomputed from `text`, never trusted
/// from upstream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub source: String,
    pub char_count: u64,
    pub word_count: u64,
    pub line_count: u64,
    /// Unknown record fields, preserved verbatim on passthrough.
    pub extra: BTreeMap<String, Value>,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>, source: impl Into<String>) -> Self {
        let text = text.into();
        let (chars, words, lines) = count_units(&text);
        Document {
            id: id.into(),
            text,
            source: source.into(),
            char_count: chars,
            word_count: words,
            line_count: lines,
            extra: BTreeMap::new(),
        }
    }

    /// Replace the text and recompute all counts from it.
    pub fn set_text(&mut self, text: String) {
        let (chars, words, lines) = count_units(&text);
        self.text = text;
        self.char_count = chars;
        self.word_count = words;
        self.line_count = lines;
    }
}

/// Count (chars, words, lines) of a text: Unicode scalars, maximal runs of
/// non-whitespace, and newline-separated segments with a trailing empty
/// segment not counted.
pub fn count_units(text: &str) -> (u64, u64, u64) {
    let chars = text.chars().count() as u64;
    let words = text.split_whitespace().count() as u64;
    let lines = if text.is_empty() {
        0
    } else {
        let n = text.split('\n').count() as u64;
        if text.ends_with('\n') {
            n - 1
        } else {
            n
        }
    };
    (chars, words, lines)
}

/// How a document's "count units" are measured in reports.
///
/// Defaults to whitespace words. `Field` reads a precomputed count from a
/// record field (for corpora that ship external tokenizer counts), falling
/// back to the word count when the field is missing or not a number.
///
/// Serializes as a plain string: "words", or the field name. A passthrough
/// field literally named "words" is therefore not addressable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnitMode {
    Words,
    Field(String),
}

impl std::str::FromStr for UnitMode {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(if s == "words" {
            UnitMode::Words
        } else {
            UnitMode::Field(s.to_string())
        })
    }
}

impl Serialize for UnitMode {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for UnitMode {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Ok(s.parse().expect("infallible"))
    }
}

impl Default for UnitMode {
    fn default() -> Self {
        UnitMode::Words
    }
}

impl UnitMode {
    pub fn units_of(&self, doc: &Document) -> u64 {
        match self {
            UnitMode::Words => doc.word_count,
            UnitMode::Field(name) => doc
                .extra
                .get(name)
                .and_then(Value::as_u64)
                .unwrap_or(doc.word_count),
        }
    }

    /// Label used in every report so the unit is never ambiguous.
    pub fn label(&self) -> &str {
        match self {
            UnitMode::Words => "words",
            UnitMode::Field(name) => name,
        }
    }
}
