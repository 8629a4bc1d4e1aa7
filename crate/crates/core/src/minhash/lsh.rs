//! Banded locality-sensitive hashing over MinHash signatures.
//!
//! The signature is cut into `bands` slices of `rows_per_band` values.
//! Two documents become a candidate pair when any band matches exactly.
//! With b bands of r rows the probability a pair at Jaccard s surfaces is
//! `1 - (1 - s^r)^b`, the curve pinned in `MinHashParams::candidate_probability`.

use super::params::MinHashParams;
use super::signature::MinHashSignature;
use std::collections::HashMap;

/// Collect candidate pairs from banding. Pairs come back sorted and unique,
/// each as `(low_ref, high_ref)`.
///
/// Oversized buckets (more members than `max_bucket_pairwise`) degrade from
/// all-pairs to a star on the lowest doc_ref, so one giant bucket of
/// boilerplate cannot go quadratic. Union-find closes the cluster over the
/// star edges anyway.
pub fn candidate_pairs(
    signatures: &[MinHashSignature],
    params: &MinHashParams,
) -> Vec<(u64, u64)> {
    let rows = params.rows_per_band;
    let mut pairs: Vec<(u64, u64)> = Vec::new();
    // buckets are rebuilt per band so the key can borrow the band slice
    let mut buckets: HashMap<&[u64], Vec<u64>> = HashMap::new();
    for band in 0..params.bands {
        buckets.clear();
        let lo = band * rows;
        let hi = lo + rows;
        for sig in signatures {
            buckets
                .entry(&sig.values[lo..hi])
                .or_default()
                .push(sig.doc_ref);
        }
        for members in buckets.values_mut() {
            if members.len() < 2 {
                continue;
            }
            members.sort_unstable();
            let n = members.len();
            if n * (n - 1) / 2 <= params.max_bucket_pairwise {
                for i in 0..n {
                    for j in i + 1..n {
                        pairs.push((members[i], members[j]));
                    }
                }
            } else {
                let hub = members[0];
                for &m in &members[1..] {
                    pairs.push((hub, m));
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minhash::shingle::shingle;
    use crate::minhash::signature::{signature, HashFamily};

    fn sign_all(texts: &[&str], params: &MinHashParams) -> Vec<MinHashSignature> {
        let family = HashFamily::from_params(params);
        texts
            .iter()
            .enumerate()
            .map(|(i, t)| signature(i as u64, &shingle(t, params), &family).unwrap())
            .collect()
    }

    #[test]
    fn identical_documents_pair_in_every_band() {
        let params = MinHashParams::default();
        let sigs = sign_all(
            &[
                "هذه مقالة عربية كاملة عن موضوع محدد يتكرر حرفيا في المصدر الثاني",
                "هذه مقالة عربية كاملة عن موضوع محدد يتكرر حرفيا في المصدر الثاني",
                "نص مختلف تماما لا يشبه المقالة الأولى بأي شكل من الأشكال هنا",
            ],
            &params,
        );
        let pairs = candidate_pairs(&sigs, &params);
        assert!(pairs.contains(&(0, 1)));
        assert!(!pairs.contains(&(0, 2)));
        assert!(!pairs.contains(&(1, 2)));
    }

    #[test]
    fn pairs_are_sorted_and_unique() {
        let params = MinHashParams::default();
        let text = "نفس النص المكرر في كل المستندات لفحص الترتيب والتفرد";
        let sigs = sign_all(&[text, text, text, text], &params);
        let pairs = candidate_pairs(&sigs, &params);
        // identical docs share every band; the six pairs appear once each
        assert_eq!(pairs, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn oversized_bucket_degrades_to_star() {
        let mut params = MinHashParams::default();
        params.max_bucket_pairwise = 3;
        let text = "عبارة قالب مكررة عبر عدد كبير من الصفحات المتشابهة جدا";
        let sigs = sign_all(&[text; 6], &params);
        let pairs = candidate_pairs(&sigs, &params);
        // 6*5/2 = 15 > 3, so only the star on doc 0 survives
        assert_eq!(pairs, vec![(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]);
    }

    #[test]
    fn empty_input_yields_no_pairs() {
        let params = MinHashParams::default();
        assert!(candidate_pairs(&[], &params).is_empty());
    }
}
