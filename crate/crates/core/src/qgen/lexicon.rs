use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::amr::lemma;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read lexicon {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("lexicon `{0}` is empty")]
    Empty(&'static str),
}

/// Word lists driving the `:ARG2` decision cascade.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleLexicons {
    directional_verbs: BTreeSet<String>,
    directional_prepositions: BTreeSet<String>,
    instrument_concepts: BTreeSet<String>,
}

/// Newline-delimited terms; blank lines and `#` comments are ignored.
pub fn parse_term_list(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

impl RuleLexicons {
    pub fn new(
        directional_verbs: BTreeSet<String>,
        directional_prepositions: BTreeSet<String>,
        instrument_concepts: BTreeSet<String>,
    ) -> Result<Self, LexiconError> {
        if directional_verbs.is_empty() {
            return Err(LexiconError::Empty("directional_verbs"));
        }
        if directional_prepositions.is_empty() {
            return Err(LexiconError::Empty("directional_prepositions"));
        }
        if instrument_concepts.is_empty() {
            return Err(LexiconError::Empty("instrument_concepts"));
        }
        Ok(RuleLexicons {
            directional_verbs,
            directional_prepositions,
            instrument_concepts,
        })
    }

    /// The lists shipped in `data/lexicon/`.
    pub fn defaults() -> Self {
        Self::new(
            parse_term_list(include_str!("../../data/lexicon/directional_verbs.txt")),
            parse_term_list(include_str!(
                "../../data/lexicon/directional_prepositions.txt"
            )),
            parse_term_list(include_str!("../../data/lexicon/instrument_concepts.txt")),
        )
        .expect("bundled lexicons are non-empty")
    }

    pub fn load(
        verbs: &Path,
        prepositions: &Path,
        instruments: &Path,
    ) -> Result<Self, LexiconError> {
        let read = |p: &Path| {
            fs::read_to_string(p)
                .map(|t| parse_term_list(&t))
                .map_err(|source| LexiconError::Io {
                    path: p.display().to_string(),
                    source,
                })
        };
        Self::new(read(verbs)?, read(prepositions)?, read(instruments)?)
    }

    /// Matches on the lemma, so `add-02` hits `add`.
    pub fn is_directional_verb(&self, concept: &str) -> bool {
        self.directional_verbs.contains(lemma(concept))
    }

    pub fn is_directional_preposition(&self, word: &str) -> bool {
        self.directional_prepositions.contains(&word.to_lowercase())
    }

    pub fn is_instrument(&self, concept: &str) -> bool {
        self.instrument_concepts.contains(concept)
            || self.instrument_concepts.contains(lemma(concept))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_hold_the_seed_terms() {
        let lex = RuleLexicons::defaults();
        for v in ["add-02", "put-01", "pour-01"] {
            assert!(lex.is_directional_verb(v), "{v}");
        }
        for p in ["in", "on", "to", "into", "over"] {
            assert!(lex.is_directional_preposition(p), "{p}");
        }
        assert!(!lex.is_directional_verb("mix-01"));
        assert!(lex.is_instrument("whisk"));
    }

    #[test]
    fn empty_lists_are_rejected() {
        let some = parse_term_list("x");
        assert!(matches!(
            RuleLexicons::new(some.clone(), some.clone(), BTreeSet::new()),
            Err(LexiconError::Empty("instrument_concepts"))
        ));
    }

    #[test]
    fn comments_and_blanks_skipped() {
        let t = parse_term_list("# c\n\n Add \nput\n");
        assert_eq!(t.into_iter().collect::<Vec<_>>(), vec!["add", "put"]);
    }
}
