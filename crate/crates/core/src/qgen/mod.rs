//! Question generation: single-instruction transformations over sentence
//! AMRs and temporal template composition over flow graphs.

mod lexicon;
pub mod single;
pub mod temporal;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amr::{AmrError, AmrGraph, Role, UNKNOWN_CONCEPT};

pub use lexicon::{parse_term_list, LexiconError, RuleLexicons};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QgenError {
    #[error("graph has no :ARG1")]
    MissingArg1,
    #[error("graph has no :ARG2")]
    MissingArg2,
    #[error("role {0} is not supported for direct questions")]
    UnsupportedRole(Role),
    #[error("instruction has no object arguments")]
    NoObjectArgs,
    #[error("no donor graph offers a different subgraph for any role")]
    NoReplaceableRole,
    #[error("no AMR for action {0}")]
    MissingActionAmr(usize),
    #[error(transparent)]
    Amr(#[from] AmrError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Category {
    RoleSpecific(Role),
    InstructionHow,
    InstructionWhatWith,
    PolarityYes,
    PolarityNo,
    TemporalMixture,
    TemporalNext,
    TemporalPrev,
    TemporalOrder,
}

impl Category {
    /// Position in dataset output order.
    pub fn rank(&self) -> u8 {
        match self {
            Category::RoleSpecific(_) => 0,
            Category::InstructionHow => 1,
            Category::InstructionWhatWith => 2,
            Category::PolarityYes => 3,
            Category::PolarityNo => 4,
            Category::TemporalMixture => 5,
            Category::TemporalNext => 6,
            Category::TemporalPrev => 7,
            Category::TemporalOrder => 8,
        }
    }

    pub fn is_temporal(&self) -> bool {
        self.rank() >= 5
    }

    /// Summary key: role-specific categories collapse to one bucket per role.
    pub fn family(&self) -> &'static str {
        match self {
            Category::RoleSpecific(_) => "role_specific",
            Category::InstructionHow | Category::InstructionWhatWith => "instruction",
            Category::PolarityYes | Category::PolarityNo => "polarity",
            _ => "temporal",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Category::RoleSpecific(r) => write!(f, "role_specific({r})"),
            Category::InstructionHow => f.write_str("instruction_how"),
            Category::InstructionWhatWith => f.write_str("instruction_what_with"),
            Category::PolarityYes => f.write_str("polarity_yes"),
            Category::PolarityNo => f.write_str("polarity_no"),
            Category::TemporalMixture => f.write_str("temporal_mixture"),
            Category::TemporalNext => f.write_str("temporal_next"),
            Category::TemporalPrev => f.write_str("temporal_prev"),
            Category::TemporalOrder => f.write_str("temporal_order"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown category `{0}`")]
pub struct UnknownCategory(pub String);

impl FromStr for Category {
    type Err = UnknownCategory;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || UnknownCategory(s.to_string());
        Ok(match s {
            "instruction_how" => Category::InstructionHow,
            "instruction_what_with" => Category::InstructionWhatWith,
            "polarity_yes" => Category::PolarityYes,
            "polarity_no" => Category::PolarityNo,
            "temporal_mixture" => Category::TemporalMixture,
            "temporal_next" => Category::TemporalNext,
            "temporal_prev" => Category::TemporalPrev,
            "temporal_order" => Category::TemporalOrder,
            _ => {
                let role = s
                    .strip_prefix("role_specific(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(bad)?;
                Category::RoleSpecific(Role::parse(role).map_err(|_| bad())?)
            }
        })
    }
}

impl Serialize for Category {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Category {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recipe_id: Option<String>,
    pub sentences: Vec<usize>,
    #[serde(default)]
    pub fallback: bool,
}

/// A generated question with its answer and where it came from.
///
/// `answer_hint` and `question_hint` carry surface text known at generation
/// time (the source sentence of an answer action, a template's English
/// form); the offline realizer prefers them over linearizing the AMR.
#[derive(Debug, Clone, PartialEq)]
pub struct QaCandidate {
    pub question_amr: AmrGraph,
    pub answer_amr: Option<AmrGraph>,
    pub answer_text: Option<String>,
    pub question_text: Option<String>,
    pub category: Category,
    pub provenance: Provenance,
    pub question_hint: Option<String>,
    pub answer_hint: Option<String>,
}

impl QaCandidate {
    pub fn with_answer_amr(question: AmrGraph, answer: AmrGraph, category: Category) -> Self {
        QaCandidate {
            question_amr: question,
            answer_amr: Some(answer),
            answer_text: None,
            question_text: None,
            category,
            provenance: Provenance::default(),
            question_hint: None,
            answer_hint: None,
        }
    }

    pub fn with_answer_text(
        question: AmrGraph,
        answer: impl Into<String>,
        category: Category,
    ) -> Self {
        QaCandidate {
            answer_amr: None,
            answer_text: Some(answer.into()),
            ..Self::with_answer_amr(question, AmrGraph::leaf("x", "x"), category)
        }
    }

    pub fn unknown_count(&self) -> usize {
        self.question_amr.count_concept(UNKNOWN_CONCEPT)
    }

    pub fn to_dump(&self) -> CandidateDump {
        CandidateDump {
            category: self.category.clone(),
            question_penman: self.question_amr.to_penman(),
            answer_penman: self.answer_amr.as_ref().map(AmrGraph::to_penman),
            answer_text: self.answer_text.clone(),
            question_text: self.question_text.clone(),
            provenance: self.provenance.clone(),
        }
    }
}

/// One line of the candidate JSONL dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateDump {
    pub category: Category,
    pub question_penman: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub answer_penman: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub answer_text: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub question_text: Option<String>,
    pub provenance: Provenance,
}
