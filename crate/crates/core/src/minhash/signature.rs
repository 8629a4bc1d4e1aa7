//! MinHash signatures under a seeded multiply-add hash family.
//!
//! The family is derived from one master seed by a counter construction:
//! position k uses `h_k(x) = a_k * x + b_k` (wrapping) with `a_k` odd, so
//! each `h_k` is a permutation of the 64-bit space. Fixed seed, fixed
//! output — signatures are byte-stable across runs and platforms.

use super::params::MinHashParams;
use super::shingle::ShingleSet;
use crate::error::{Error, Result};
use xxhash_rust::xxh3::xxh3_64_with_seed;

pub struct HashFamily {
    a: Vec<u64>,
    b: Vec<u64>,
}

impl HashFamily {
    pub fn new(num_hashes: usize, seed: u64) -> Self {
        let mut a = Vec::with_capacity(num_hashes);
        let mut b = Vec::with_capacity(num_hashes);
        for k in 0..num_hashes as u64 {
            a.push(xxh3_64_with_seed(&(2 * k).to_le_bytes(), seed) | 1);
            b.push(xxh3_64_with_seed(&(2 * k + 1).to_le_bytes(), seed));
        }
        HashFamily { a, b }
    }

    pub fn from_params(params: &MinHashParams) -> Self {
        HashFamily::new(params.num_hashes(), params.seed)
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

/// Minimum hash values for one document; `doc_ref` is the document's
/// ordinal in the run, matching the persisted signature records.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinHashSignature {
    pub doc_ref: u64,
    pub values: Vec<u64>,
}

/// Compute the signature of a shingle set: position k holds the minimum of
/// `h_k` over all shingles.
pub fn signature(
    doc_ref: u64,
    shingles: &ShingleSet,
    family: &HashFamily,
) -> Result<MinHashSignature> {
    if shingles.is_empty() {
        return Err(Error::data("cannot sign an empty shingle set"));
    }
    // Tiled over hash positions: a fixed-width accumulator block stays in
    // registers across the whole shingle pass, and the fixed-count inner loop
    // unrolls into a straight mul-add-min chain on 64-bit SIMD.
    const TILE: usize = 16;
    let mut values = vec![u64::MAX; family.len()];
    let mut k = 0;
    while k + TILE <= family.len() {
        let a: [u64; TILE] = family.a[k..k + TILE].try_into().unwrap();
        let b: [u64; TILE] = family.b[k..k + TILE].try_into().unwrap();
        let mut acc = [u64::MAX; TILE];
        for &x in shingles {
            for i in 0..TILE {
                acc[i] = acc[i].min(a[i].wrapping_mul(x).wrapping_add(b[i]));
            }
        }
        values[k..k + TILE].copy_from_slice(&acc);
        k += TILE;
    }
    for &x in shingles {
        for ((v, &a), &b) in values[k..].iter_mut().zip(&family.a[k..]).zip(&family.b[k..]) {
            *v = (*v).min(a.wrapping_mul(x).wrapping_add(b));
        }
    }
    Ok(MinHashSignature { doc_ref, values })
}

/// Fraction of positions on which two signatures agree; estimates the
/// Jaccard similarity of the underlying shingle sets.
pub fn agreement(a: &MinHashSignature, b: &MinHashSignature) -> f64 {
    assert_eq!(a.values.len(), b.values.len());
    if a.values.is_empty() {
        return 0.0;
    }
    let equal = a
        .values
        .iter()
        .zip(&b.values)
        .filter(|(x, y)| x == y)
        .count();
    equal as f64 / a.values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minhash::shingle::shingle;

    #[test]
    fn identical_texts_identical_signatures() {
        let params = MinHashParams::default();
        let family = HashFamily::from_params(&params);
        let s = shingle("نص تجريبي للتوقيع المتطابق بين نسختين", &params);
        let sig1 = signature(0, &s, &family).unwrap();
        let sig2 = signature(1, &s, &family).unwrap();
        assert_eq!(sig1.values, sig2.values);
        assert_eq!(sig1.values.len(), 112);
    }

    #[test]
    fn empty_shingle_set_is_an_error() {
        let family = HashFamily::new(8, 0);
        assert!(signature(0, &vec![], &family).is_err());
    }

    #[test]
    fn different_seeds_give_different_families() {
        let s = shingle("some text for the seed separation check", &MinHashParams::default());
        let f0 = HashFamily::new(112, 0);
        let f1 = HashFamily::new(112, 1);
        let sig0 = signature(0, &s, &f0).unwrap();
        let sig1 = signature(0, &s, &f1).unwrap();
        assert_ne!(sig0.values, sig1.values);
    }

    #[test]
    fn signatures_are_stable_across_calls() {
        let params = MinHashParams::default();
        let family = HashFamily::from_params(&params);
        let s = shingle("ثبات التوقيع عبر الاستدعاءات المتكررة", &params);
        assert_eq!(
            signature(7, &s, &family).unwrap(),
            signature(7, &s, &family).unwrap()
        );
    }

    #[test]
    fn disjoint_sets_rarely_agree() {
        // disjoint inputs map to distinct values under each permutation
        let family = HashFamily::new(112, 42);
        let a: ShingleSet = (0..500u64).map(|i| i.wrapping_mul(0x9E3779B97F4A7C15)).collect();
        let b: ShingleSet = (500..1000u64).map(|i| i.wrapping_mul(0x9E3779B97F4A7C15)).collect();
        let mut a = a;
        let mut b = b;
        a.sort_unstable();
        b.sort_unstable();
        let sig_a = signature(0, &a, &family).unwrap();
        let sig_b = signature(1, &b, &family).unwrap();
        assert!(agreement(&sig_a, &sig_b) < 0.05);
    }
}
