use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::BackendClient;
use crate::metrics::{Rouge1, RougeVariant};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundTripPair {
    pub question: String,
    pub answer: String,
    pub context: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Kept { score: f64 },
    Dropped { score: f64 },
    Skipped { reason: String },
}

impl Verdict {
    pub fn is_kept(&self) -> bool {
        matches!(self, Verdict::Kept { .. })
    }

    pub fn score(&self) -> Option<f64> {
        match self {
            Verdict::Kept { score } | Verdict::Dropped { score } => Some(*score),
            Verdict::Skipped { .. } => None,
        }
    }

    /// Same score judged against another threshold.
    pub fn rethreshold(&self, threshold: f64) -> Verdict {
        match self.score() {
            Some(score) if score > threshold => Verdict::Kept { score },
            Some(score) => Verdict::Dropped { score },
            None => self.clone(),
        }
    }
}

/// ROUGE-1 between the original answer and the one the backend gives back.
pub fn score_round_trip(original: &str, returned: &str, variant: RougeVariant) -> f64 {
    Rouge1(variant).value(original, returned)
}

/// Asks the backend to answer each question and keeps a pair iff its score
/// is strictly above `threshold`. One verdict per pair, in input order;
/// backend failures become `Skipped`.
///
/// # Panics
/// If `threshold` is outside `[0, 1]`.
pub fn round_trip_filter(
    pairs: &[RoundTripPair],
    client: &dyn BackendClient,
    threshold: f64,
    variant: RougeVariant,
) -> Vec<Verdict> {
    assert!(
        (0.0..=1.0).contains(&threshold),
        "threshold {threshold} outside [0, 1]"
    );
    pairs
        .par_iter()
        .map(|p| match client.answer_question(&p.context, &p.question) {
            Ok(returned) => Verdict::Dropped {
                score: score_round_trip(&p.answer, &returned, variant),
            }
            .rethreshold(threshold),
            Err(e) => Verdict::Skipped {
                reason: e.to_string(),
            },
        })
        .collect()
}
