use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Shingling granularity. Character 5-grams on normalized text by default;
/// word shingles are available as an alternative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShingleMode {
    Chars,
    Words,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MinHashParams {
    pub shingle_len: usize,
    pub bands: usize,
    pub rows_per_band: usize,
    pub seed: u64,
    pub shingle_mode: ShingleMode,
    /// Band buckets larger than this are unioned as one group instead of
    /// expanded pairwise (quadratic blowup guard on pathological boilerplate).
    pub max_bucket_pairwise: usize,
}

impl Default for MinHashParams {
    fn default() -> Self {
        MinHashParams {
            shingle_len: 5,
            bands: 14,
            rows_per_band: 8,
            seed: 0,
            shingle_mode: ShingleMode::Chars,
            max_bucket_pairwise: 10_000,
        }
    }
}

impl MinHashParams {
    /// Total hash functions: bands x rows_per_band (112 at defaults).
    pub fn num_hashes(&self) -> usize {
        self.bands * self.rows_per_band
    }

    pub fn validate(&self) -> Result<()> {
        if self.shingle_len == 0 {
            return Err(Error::config("shingle_len must be positive"));
        }
        if self.bands == 0 || self.rows_per_band == 0 {
            return Err(Error::config("bands and rows_per_band must be positive"));
        }
        if self.max_bucket_pairwise < 2 {
            return Err(Error::config("max_bucket_pairwise must be at least 2"));
        }
        Ok(())
    }

    /// Probability that a pair with Jaccard similarity `s` becomes a
    /// candidate: 1 - (1 - s^rows)^bands.
    pub fn candidate_probability(&self, s: f64) -> f64 {
        1.0 - (1.0 - s.powi(self.rows_per_band as i32)).powi(self.bands as i32)
    }
}
