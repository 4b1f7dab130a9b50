//! Language-model augmentation of a generated dataset: paraphrasing each
//! question, and asking new questions for existing answers.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::backend::{round_trip_filter, BackendClient, RoundTripPair, Verdict};
use crate::dataset::{AugmentMethod, AugmentationRecord, DatasetRecord, RealizerKind};
use crate::metrics::RougeVariant;
use crate::qgen::Category;

pub const DEFAULT_PARAPHRASES: usize = 5;
pub const DEFAULT_PER_ANSWER: usize = 3;
pub const DEFAULT_THRESHOLD: f64 = 0.25;

/// Case-folds, collapses whitespace and strips terminal punctuation.
pub fn normalize_question(q: &str) -> String {
    let lower = q.to_lowercase();
    let joined = lower.split_whitespace().collect::<Vec<_>>().join(" ");
    joined
        .trim_end_matches(|c: char| c.is_ascii_punctuation() || c.is_whitespace())
        .to_string()
}

/// A record the backend could not serve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skip {
    pub qa_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AugmentOutcome {
    /// Originals in input order, each followed by the questions derived from it.
    pub dataset: Vec<DatasetRecord>,
    /// One entry per produced question, including dropped ones.
    pub audit: Vec<AugmentationRecord>,
    pub skipped: Vec<Skip>,
    /// Records that needed a backend call.
    pub attempted: usize,
}

impl AugmentOutcome {
    pub fn added(&self) -> usize {
        self.dataset
            .iter()
            .filter(|r| r.augmentation.is_some())
            .count()
    }
}

fn derived(
    src: &DatasetRecord,
    qa_id: String,
    question: String,
    audit: AugmentationRecord,
) -> DatasetRecord {
    DatasetRecord {
        qa_id,
        question,
        augmentation: Some(audit),
        realizer: RealizerKind::Neural,
        ..src.clone()
    }
}

/// Paraphrases every question `k` times. Paraphrases equal (after
/// [`normalize_question`]) to any question already in the dataset are
/// dropped; originals are always kept.
pub fn paraphrase_augment(
    dataset: &[DatasetRecord],
    client: &dyn BackendClient,
    k: usize,
) -> AugmentOutcome {
    let backend = client.identity();
    let replies: Vec<_> = dataset
        .par_iter()
        .map(|r| {
            client.paraphrase(&r.question, k).map(|mut v| {
                v.truncate(k);
                v
            })
        })
        .collect();
    let mut seen: HashSet<String> = dataset
        .iter()
        .map(|r| normalize_question(&r.question))
        .collect();
    let mut out = AugmentOutcome {
        attempted: if k == 0 { 0 } else { dataset.len() },
        ..Default::default()
    };
    for (r, reply) in dataset.iter().zip(replies) {
        out.dataset.push(r.clone());
        let texts = match reply {
            Ok(t) => t,
            Err(e) => {
                out.skipped.push(Skip {
                    qa_id: r.qa_id.clone(),
                    reason: e.to_string(),
                });
                continue;
            }
        };
        for (i, text) in texts.into_iter().enumerate() {
            let text = text.trim().to_string();
            if text.is_empty() || !seen.insert(normalize_question(&text)) {
                continue;
            }
            let audit = AugmentationRecord {
                source_qa_id: r.qa_id.clone(),
                method: AugmentMethod::Paraphrase,
                question: text.clone(),
                verdict: None,
                backend: backend.clone(),
            };
            out.audit.push(audit.clone());
            out.dataset
                .push(derived(r, format!("{}-p{}", r.qa_id, i + 1), text, audit));
        }
    }
    out
}

/// What the answering model reads during the round trip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContextScope {
    #[default]
    Recipe,
    Sentences,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnswerBasedOptions {
    pub n_per_answer: usize,
    pub threshold: f64,
    pub score: RougeVariant,
    pub context: ContextScope,
}

impl Default for AnswerBasedOptions {
    fn default() -> Self {
        AnswerBasedOptions {
            n_per_answer: DEFAULT_PER_ANSWER,
            threshold: DEFAULT_THRESHOLD,
            score: RougeVariant::F1,
            context: ContextScope::Recipe,
        }
    }
}

fn context_for(
    r: &DatasetRecord,
    recipes: &BTreeMap<String, Vec<String>>,
    scope: ContextScope,
) -> Option<String> {
    let sents = recipes.get(&r.recipe_id)?;
    let picked: Vec<&str> = match scope {
        ContextScope::Recipe => sents.iter().map(String::as_str).collect(),
        ContextScope::Sentences => r
            .sentences
            .iter()
            .filter_map(|&i| sents.get(i).map(String::as_str))
            .collect(),
    };
    (!picked.is_empty()).then(|| picked.join(" "))
}

fn is_answer_source(r: &DatasetRecord) -> bool {
    r.augmentation.is_none() && !matches!(r.category, Category::PolarityYes | Category::PolarityNo)
}

/// Asks the backend for new questions whose answer is an existing answer,
/// and keeps those that survive the round-trip filter. Each distinct answer
/// of a recipe is used once; yes/no answers are not used. `recipes` maps a
/// recipe id to its sentences.
///
/// # Panics
/// If the threshold is outside `[0, 1]`.
pub fn answer_based_augment(
    dataset: &[DatasetRecord],
    recipes: &BTreeMap<String, Vec<String>>,
    client: &dyn BackendClient,
    opts: &AnswerBasedOptions,
) -> AugmentOutcome {
    assert!(
        (0.0..=1.0).contains(&opts.threshold),
        "threshold {} outside [0, 1]",
        opts.threshold
    );
    let backend = client.identity();
    let mut used = HashSet::new();
    let sources: Vec<bool> = dataset
        .iter()
        .map(|r| {
            opts.n_per_answer > 0
                && is_answer_source(r)
                && used.insert((r.recipe_id.clone(), normalize_question(&r.answer)))
        })
        .collect();
    type Reply = Result<Vec<(String, Verdict)>, String>;
    let replies: Vec<Option<Reply>> = dataset
        .par_iter()
        .zip(&sources)
        .map(|(r, &is_source)| {
            if !is_source {
                return None;
            }
            let Some(context) = context_for(r, recipes, opts.context) else {
                return Some(Err(format!("no context for recipe `{}`", r.recipe_id)));
            };
            let mut qs = match client.questions_for_answer(&context, &r.answer, opts.n_per_answer) {
                Ok(q) => q,
                Err(e) => return Some(Err(e.to_string())),
            };
            qs.truncate(opts.n_per_answer);
            qs.retain(|q| !q.trim().is_empty());
            let pairs: Vec<RoundTripPair> = qs
                .iter()
                .map(|q| RoundTripPair {
                    question: q.trim().to_string(),
                    answer: r.answer.clone(),
                    context: context.clone(),
                })
                .collect();
            let verdicts = round_trip_filter(&pairs, client, opts.threshold, opts.score);
            Some(Ok(pairs
                .into_iter()
                .map(|p| p.question)
                .zip(verdicts)
                .collect()))
        })
        .collect();
    let mut out = AugmentOutcome {
        attempted: sources.iter().filter(|&&s| s).count(),
        ..Default::default()
    };
    for (r, reply) in dataset.iter().zip(replies) {
        out.dataset.push(r.clone());
        match reply {
            None => {}
            Some(Err(reason)) => out.skipped.push(Skip {
                qa_id: r.qa_id.clone(),
                reason,
            }),
            Some(Ok(items)) => {
                for (i, (question, verdict)) in items.into_iter().enumerate() {
                    let kept = verdict.is_kept();
                    let audit = AugmentationRecord {
                        source_qa_id: r.qa_id.clone(),
                        method: AugmentMethod::AnswerBased,
                        question: question.clone(),
                        verdict: Some(verdict),
                        backend: backend.clone(),
                    };
                    out.audit.push(audit.clone());
                    if kept {
                        let mut rec =
                            derived(r, format!("{}-a{}", r.qa_id, i + 1), question, audit);
                        rec.question_penman = None;
                        out.dataset.push(rec);
                    }
                }
            }
        }
    }
    out
}
