use std::collections::HashMap;

use super::tokenize;

/// Precision, recall and F-measure of a candidate against a reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    const ZERO: Prf = Prf {
        precision: 0.0,
        recall: 0.0,
        f1: 0.0,
    };

    fn from_counts(overlap: usize, candidate_len: usize, reference_len: usize) -> Prf {
        if overlap == 0 || candidate_len == 0 || reference_len == 0 {
            return Prf::ZERO;
        }
        let precision = overlap as f64 / candidate_len as f64;
        let recall = overlap as f64 / reference_len as f64;
        Prf {
            precision,
            recall,
            f1: 2.0 * precision * recall / (precision + recall),
        }
    }
}

fn counts(tokens: &[String]) -> HashMap<&str, usize> {
    let mut m = HashMap::new();
    for t in tokens {
        *m.entry(t.as_str()).or_insert(0) += 1;
    }
    m
}

fn clipped_overlap(a: &[String], b: &[String]) -> usize {
    let ca = counts(a);
    counts(b)
        .into_iter()
        .map(|(t, n)| n.min(ca.get(t).copied().unwrap_or(0)))
        .sum()
}

/// Unigram overlap with clipped counts; `reference` first.
pub fn rouge1_prf(reference: &str, candidate: &str) -> Prf {
    let r = tokenize(reference);
    let c = tokenize(candidate);
    Prf::from_counts(clipped_overlap(&r, &c), c.len(), r.len())
}

pub fn rouge1(reference: &str, candidate: &str) -> f64 {
    rouge1_prf(reference, candidate).f1
}

fn lcs_len(a: &[String], b: &[String]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Longest-common-subsequence F-measure.
pub fn rouge_l(reference: &str, candidate: &str) -> f64 {
    let r = tokenize(reference);
    let c = tokenize(candidate);
    Prf::from_counts(lcs_len(&r, &c), c.len(), r.len()).f1
}

/// Bag-of-tokens F1, as in extractive QA evaluation.
pub fn token_f1(reference: &str, candidate: &str) -> f64 {
    let r = tokenize(reference);
    let c = tokenize(candidate);
    Prf::from_counts(clipped_overlap(&r, &c), c.len(), r.len()).f1
}
