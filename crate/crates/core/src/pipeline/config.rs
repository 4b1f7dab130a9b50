use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{read_file, PipelineError};
use crate::augment::{AnswerBasedOptions, DEFAULT_PARAPHRASES};
use crate::backend::BackendConfig;
use crate::qgen::RuleLexicons;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Stages {
    pub single: bool,
    pub temporal: bool,
    pub paraphrase: bool,
    pub answer_based: bool,
}

impl Default for Stages {
    fn default() -> Self {
        Stages {
            single: true,
            temporal: true,
            paraphrase: false,
            answer_based: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LexiconPaths {
    pub directional_verbs: PathBuf,
    pub directional_prepositions: PathBuf,
    pub instruments: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    pub dataset: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<PathBuf>,
    /// Audit entries of every augmentation attempt, kept or not.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audit: Option<PathBuf>,
}

fn default_paraphrases() -> usize {
    DEFAULT_PARAPHRASES
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub recipes: PathBuf,
    /// Sidecar PENMAN file, or directory of `.amr` files, with
    /// `# ::id <recipe>.<sentence>` headers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amr: Option<PathBuf>,
    /// Directory holding `<recipe>.flow.json` files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flow_graphs: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub templates: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lexicons: Option<LexiconPaths>,
    #[serde(default)]
    pub stages: Stages,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backend: Option<BackendConfig>,
    #[serde(default)]
    pub offline: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_paraphrases")]
    pub paraphrases: usize,
    #[serde(default)]
    pub answer_based: AnswerBasedOptions,
    /// Worker threads; all cores when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    pub output: OutputPaths,
}

fn rebase(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<Self, PipelineError> {
        serde_json::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))
    }

    /// Reads a config file; relative paths are taken from its directory.
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let mut c = Self::from_json(&read_file(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        c.rebase(base);
        Ok(c)
    }

    pub fn rebase(&mut self, base: &Path) {
        rebase(base, &mut self.recipes);
        for p in [&mut self.amr, &mut self.flow_graphs, &mut self.templates]
            .into_iter()
            .flatten()
        {
            rebase(base, p);
        }
        if let Some(l) = &mut self.lexicons {
            rebase(base, &mut l.directional_verbs);
            rebase(base, &mut l.directional_prepositions);
            rebase(base, &mut l.instruments);
        }
        rebase(base, &mut self.output.dataset);
        for p in [&mut self.output.summary, &mut self.output.audit]
            .into_iter()
            .flatten()
        {
            rebase(base, p);
        }
    }

    /// Polarity sampling is the only stochastic step.
    pub fn is_stochastic(&self) -> bool {
        self.stages.single
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.is_stochastic() && self.seed.is_none() {
            return Err(PipelineError::MissingSeed);
        }
        if !(0.0..=1.0).contains(&self.answer_based.threshold) {
            return Err(PipelineError::Config(format!(
                "threshold {} outside [0, 1]",
                self.answer_based.threshold
            )));
        }
        if self.stages.paraphrase && self.paraphrases == 0 {
            return Err(PipelineError::Config(
                "paraphrases must be at least 1".into(),
            ));
        }
        if self.workers == Some(0) {
            return Err(PipelineError::Config("workers must be positive".into()));
        }
        if let Some(b) = &self.backend {
            b.validate()?;
        }
        Ok(())
    }

    pub fn lexicons(&self) -> Result<RuleLexicons, PipelineError> {
        Ok(match &self.lexicons {
            Some(l) => RuleLexicons::load(
                &l.directional_verbs,
                &l.directional_prepositions,
                &l.instruments,
            )?,
            None => RuleLexicons::defaults(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str =
        r#"{"recipes": "r.jsonl", "seed": 1, "output": {"dataset": "out/d.jsonl"}}"#;

    #[test]
    fn defaults_and_rebase() {
        let mut c = PipelineConfig::from_json(MINIMAL).unwrap();
        assert!(c.stages.single && c.stages.temporal && !c.stages.paraphrase);
        assert_eq!(c.paraphrases, 5);
        assert_eq!(c.answer_based.n_per_answer, 3);
        assert_eq!(c.answer_based.threshold, 0.25);
        c.rebase(Path::new("/data"));
        assert_eq!(c.recipes, Path::new("/data/r.jsonl"));
        assert_eq!(c.output.dataset, Path::new("/data/out/d.jsonl"));
        assert!(c.validate().is_ok());
    }

    #[test]
    fn validation() {
        let mut c = PipelineConfig::from_json(MINIMAL).unwrap();
        c.seed = None;
        assert!(matches!(c.validate(), Err(PipelineError::MissingSeed)));
        c.stages.single = false;
        assert!(c.validate().is_ok());
        c.answer_based.threshold = 1.5;
        assert!(matches!(c.validate(), Err(PipelineError::Config(_))));
        assert!(
            PipelineConfig::from_json(r#"{"recipes":"r","output":{"dataset":"d"},"sed":1}"#)
                .is_err()
        );
    }
}
