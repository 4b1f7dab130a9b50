//! Intrinsic metrics over question sets: Dist-n, n-gram diversity and
//! coverage under a pairwise scorer, plus the lexical scorers.

mod lexical;

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use lexical::{rouge1, rouge1_prf, rouge_l, token_f1, Prf};

/// Largest n reported by [`diversity`].
pub const MAX_N: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("reference set is empty")]
    EmptyReference,
    #[error("generated set is empty")]
    EmptyGenerated,
    #[error("unknown scorer `{0}` (known: exact, rouge1, rougeL, token_f1)")]
    UnknownScorer(String),
}

/// Lowercases, splits on whitespace, and makes every punctuation character
/// its own token.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let mut word = String::new();
        for c in chunk.chars() {
            if c.is_alphanumeric() {
                word.extend(c.to_lowercase());
            } else {
                if !word.is_empty() {
                    out.push(std::mem::take(&mut word));
                }
                out.push(c.to_string());
            }
        }
        if !word.is_empty() {
            out.push(word);
        }
    }
    out
}

/// Distinct n-grams over total n-grams across the corpus; n-grams never
/// span two questions. Zero when the corpus has no n-grams.
///
/// # Panics
/// If `n` is zero.
pub fn dist_n<S: AsRef<str>>(questions: &[S], n: usize) -> f64 {
    assert!(n >= 1, "n-gram order must be positive");
    let mut seen: HashSet<Vec<String>> = HashSet::new();
    let mut total = 0usize;
    for q in questions {
        let toks = tokenize(q.as_ref());
        for w in toks.windows(n) {
            total += 1;
            if !seen.contains(w) {
                seen.insert(w.to_vec());
            }
        }
    }
    if total == 0 {
        0.0
    } else {
        seen.len() as f64 / total as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityReport {
    pub dist: BTreeMap<usize, f64>,
    pub ngram_diversity: f64,
    pub questions: usize,
    pub tokens: usize,
}

/// Mean of Dist-1 through Dist-5.
pub fn ngram_diversity<S: AsRef<str>>(questions: &[S]) -> f64 {
    diversity(questions).ngram_diversity
}

pub fn diversity<S: AsRef<str>>(questions: &[S]) -> DiversityReport {
    let dist: BTreeMap<usize, f64> = (1..=MAX_N).map(|n| (n, dist_n(questions, n))).collect();
    let ngram_diversity = (dist[&1] + dist[&2] + dist[&3] + dist[&4] + dist[&5]) / MAX_N as f64;
    DiversityReport {
        dist,
        ngram_diversity,
        questions: questions.len(),
        tokens: questions.iter().map(|q| tokenize(q.as_ref()).len()).sum(),
    }
}

/// A pairwise similarity between a reference and a generated question.
pub trait PairScorer: Send + Sync {
    fn name(&self) -> &str;
    fn score(&self, reference: &str, candidate: &str) -> f64;
    /// Inclusive bounds of [`PairScorer::score`].
    fn range(&self) -> (f64, f64) {
        (0.0, 1.0)
    }
    fn symmetric(&self) -> bool {
        true
    }
}

/// 1.0 when the token sequences are identical, else 0.0.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactMatch;

impl PairScorer for ExactMatch {
    fn name(&self) -> &str {
        "exact"
    }
    fn score(&self, a: &str, b: &str) -> f64 {
        if tokenize(a) == tokenize(b) {
            1.0
        } else {
            0.0
        }
    }
}

/// Which component of ROUGE-1 to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RougeVariant {
    #[default]
    F1,
    Precision,
    Recall,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Rouge1(pub RougeVariant);

impl Rouge1 {
    pub fn value(&self, reference: &str, candidate: &str) -> f64 {
        let p = rouge1_prf(reference, candidate);
        match self.0 {
            RougeVariant::F1 => p.f1,
            RougeVariant::Precision => p.precision,
            RougeVariant::Recall => p.recall,
        }
    }
}

impl PairScorer for Rouge1 {
    fn name(&self) -> &str {
        match self.0 {
            RougeVariant::F1 => "rouge1",
            RougeVariant::Precision => "rouge1_precision",
            RougeVariant::Recall => "rouge1_recall",
        }
    }
    fn score(&self, a: &str, b: &str) -> f64 {
        self.value(a, b)
    }
    fn symmetric(&self) -> bool {
        self.0 == RougeVariant::F1
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RougeL;

impl PairScorer for RougeL {
    fn name(&self) -> &str {
        "rougeL"
    }
    fn score(&self, a: &str, b: &str) -> f64 {
        rouge_l(a, b)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TokenF1;

impl PairScorer for TokenF1 {
    fn name(&self) -> &str {
        "token_f1"
    }
    fn score(&self, a: &str, b: &str) -> f64 {
        token_f1(a, b)
    }
}

pub fn scorer_by_name(name: &str) -> Result<Box<dyn PairScorer>, MetricsError> {
    Ok(match name {
        "exact" => Box::new(ExactMatch),
        "rouge1" => Box::new(Rouge1(RougeVariant::F1)),
        "rouge1_precision" => Box::new(Rouge1(RougeVariant::Precision)),
        "rouge1_recall" => Box::new(Rouge1(RougeVariant::Recall)),
        "rougeL" | "rouge_l" => Box::new(RougeL),
        "token_f1" => Box::new(TokenF1),
        other => return Err(MetricsError::UnknownScorer(other.to_string())),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceBest {
    pub reference_id: String,
    pub best_generated_id: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub coverage: f64,
    pub per_reference: Vec<ReferenceBest>,
    pub scorer: String,
    pub scorer_range: (f64, f64),
    pub n_ref: usize,
    pub n_gen: usize,
}

/// Mean over references of the best score against any generated question.
/// Items are `(id, text)`; ties go to the earliest generated item.
pub fn coverage(
    reference: &[(String, String)],
    generated: &[(String, String)],
    scorer: &dyn PairScorer,
) -> Result<CoverageReport, MetricsError> {
    if reference.is_empty() {
        return Err(MetricsError::EmptyReference);
    }
    if generated.is_empty() {
        return Err(MetricsError::EmptyGenerated);
    }
    let per_reference: Vec<ReferenceBest> = reference
        .par_iter()
        .map(|(rid, rtext)| {
            let mut best = (0, f64::NEG_INFINITY);
            for (j, (_, gtext)) in generated.iter().enumerate() {
                let s = scorer.score(rtext, gtext);
                if s > best.1 {
                    best = (j, s);
                }
            }
            ReferenceBest {
                reference_id: rid.clone(),
                best_generated_id: generated[best.0].0.clone(),
                score: best.1,
            }
        })
        .collect();
    let sum: f64 = per_reference.iter().map(|r| r.score).sum();
    Ok(CoverageReport {
        coverage: sum / per_reference.len() as f64,
        per_reference,
        scorer: scorer.name().to_string(),
        scorer_range: scorer.range(),
        n_ref: reference.len(),
        n_gen: generated.len(),
    })
}

/// [`coverage`] over bare texts, with positions as ids.
pub fn coverage_of_texts<S: AsRef<str>>(
    reference: &[S],
    generated: &[S],
    scorer: &dyn PairScorer,
) -> Result<CoverageReport, MetricsError> {
    let ids = |xs: &[S]| -> Vec<(String, String)> {
        xs.iter()
            .enumerate()
            .map(|(i, s)| (i.to_string(), s.as_ref().to_string()))
            .collect()
    };
    coverage(&ids(reference), &ids(generated), scorer)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizer() {
        assert!(tokenize("").is_empty());
        assert_eq!(
            tokenize("What's in the Soup?"),
            ["what", "'", "s", "in", "the", "soup", "?"]
        );
        assert_eq!(tokenize("  a\tb\n"), ["a", "b"]);
    }

    #[test]
    fn dist_examples() {
        assert_eq!(dist_n(&["a b", "a b"], 2), 0.5);
        assert_eq!(dist_n(&["a b c"], 1), 1.0);
        assert_eq!(dist_n(&["a"], 2), 0.0);
        let empty: [&str; 0] = [];
        assert_eq!(dist_n(&empty, 1), 0.0);
        // no bigram across the question boundary
        assert_eq!(dist_n(&["a", "b"], 2), 0.0);
    }

    #[test]
    fn diversity_singleton() {
        let r = diversity(&["a b c d e"]);
        assert!(r.dist.values().all(|&d| d == 1.0));
        assert_eq!(r.ngram_diversity, 1.0);
        assert_eq!(r.tokens, 5);
    }

    #[test]
    fn coverage_examples() {
        let refs = ["how long do we cook it?", "what is in the soup?"];
        let same = coverage_of_texts(&refs, &refs, &ExactMatch).unwrap();
        assert_eq!(same.coverage, 1.0);
        let other = ["where is the pot?", "who eats?"];
        assert_eq!(
            coverage_of_texts(&refs, &other, &ExactMatch)
                .unwrap()
                .coverage,
            0.0
        );
        let none: [&str; 0] = [];
        assert_eq!(
            coverage_of_texts(&none, &refs, &ExactMatch).unwrap_err(),
            MetricsError::EmptyReference
        );
        assert_eq!(
            coverage_of_texts(&refs, &none, &ExactMatch).unwrap_err(),
            MetricsError::EmptyGenerated
        );
    }

    struct Table(Vec<Vec<f64>>);

    impl PairScorer for Table {
        fn name(&self) -> &str {
            "table"
        }
        fn score(&self, a: &str, b: &str) -> f64 {
            self.0[a.parse::<usize>().unwrap()][b.parse::<usize>().unwrap()]
        }
    }

    #[test]
    fn coverage_hand_matrix() {
        // rows: references, columns: generated
        let m = Table(vec![
            vec![0.1, 0.7, 0.3],
            vec![0.5, 0.2, 0.4],
            vec![0.0, 0.0, 0.9],
        ]);
        let r = coverage_of_texts(&["0", "1", "2"], &["0", "1", "2"], &m).unwrap();
        assert!((r.coverage - (0.7 + 0.5 + 0.9) / 3.0).abs() < 1e-12);
        let best: Vec<_> = r
            .per_reference
            .iter()
            .map(|b| b.best_generated_id.as_str())
            .collect();
        assert_eq!(best, ["1", "0", "2"]);
    }

    #[test]
    fn scorer_lookup() {
        assert_eq!(scorer_by_name("rougeL").unwrap().name(), "rougeL");
        assert!(matches!(
            scorer_by_name("bleurt"),
            Err(MetricsError::UnknownScorer(_))
        ));
    }
}
