//! End-to-end orchestration: recipe ingest, configuration, generation runs
//! and metric reports.

mod config;
mod evaluate;
mod run;

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amr::AmrError;
use crate::backend::BackendError;
use crate::dataset::DatasetError;
use crate::flowgraph::FlowGraphError;
use crate::metrics::MetricsError;
use crate::qgen::temporal::TemplateError;
use crate::qgen::LexiconError;

pub use config::{LexiconPaths, OutputPaths, PipelineConfig, Stages};
pub use evaluate::{evaluate, read_questions, validate_dataset, MetricReport, ValidationReport};
pub use run::{derive_seed, run, run_with, RunOutput, RunSummary, StageReport};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: no valid records ({} problems, first: {})", diagnostics.len(), diagnostics.first().map_or("-", String::as_str))]
    SchemaViolation {
        path: String,
        diagnostics: Vec<String>,
    },
    #[error("config: {0}")]
    Config(String),
    #[error("a seed is required when stochastic stages are enabled")]
    MissingSeed,
    #[error("temporal stage enabled but no flow graphs configured")]
    MissingFlowGraph,
    #[error("stage `{0}` needs a backend but none is available")]
    BackendRequiredButUnavailable(&'static str),
    #[error("{path}:{line}: {source}")]
    Amr {
        path: String,
        line: usize,
        #[source]
        source: AmrError,
    },
    #[error("{path}: {source}")]
    FlowGraph {
        path: String,
        #[source]
        source: FlowGraphError,
    },
    #[error(transparent)]
    Templates(#[from] TemplateError),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Backend(#[from] BackendError),
}

pub(crate) fn read_file(path: &Path) -> Result<String, PipelineError> {
    fs::read_to_string(path).map_err(|source| match source.kind() {
        std::io::ErrorKind::NotFound => PipelineError::FileNotFound(path.to_path_buf()),
        _ => PipelineError::Io {
            path: path.display().to_string(),
            source,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecipeDoc {
    pub id: String,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub ingredients: Vec<String>,
    /// One instruction sentence per entry.
    pub steps: Vec<String>,
}

impl RecipeDoc {
    fn check(&self) -> Result<(), String> {
        if self.id.trim().is_empty() {
            return Err("empty id".into());
        }
        if self.steps.is_empty() {
            return Err(format!("recipe `{}` has no steps", self.id));
        }
        if let Some(i) = self.steps.iter().position(|s| s.trim().is_empty()) {
            return Err(format!("recipe `{}` step {i} is empty", self.id));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    /// `line N` for JSONL input, `entry N` for a JSON array.
    pub location: String,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Ingested {
    pub recipes: Vec<RecipeDoc>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Reads recipes from a JSON array, a single JSON object, or JSONL. Bad
/// entries are reported and skipped; failing only when none is valid.
pub fn ingest(path: &Path) -> Result<Ingested, PipelineError> {
    let text = read_file(path)?;
    let trimmed = text.trim_start();
    let mut raw: Vec<(String, Result<RecipeDoc, String>)> = Vec::new();
    let whole = trimmed.starts_with('[') || path.extension().is_some_and(|e| e == "json");
    if whole {
        match serde_json::from_str::<serde_json::Value>(&text) {
            Ok(serde_json::Value::Array(items)) => {
                for (i, v) in items.into_iter().enumerate() {
                    raw.push((
                        format!("entry {}", i + 1),
                        serde_json::from_value(v).map_err(|e| e.to_string()),
                    ));
                }
            }
            Ok(v) => raw.push((
                "entry 1".into(),
                serde_json::from_value(v).map_err(|e| e.to_string()),
            )),
            Err(e) => raw.push((format!("line {}", e.line()), Err(e.to_string()))),
        }
    } else {
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            raw.push((
                format!("line {}", i + 1),
                serde_json::from_str(line).map_err(|e| e.to_string()),
            ));
        }
    }
    let mut out = Ingested::default();
    let mut ids = HashSet::new();
    for (location, doc) in raw {
        let checked = doc.and_then(|d| {
            d.check()?;
            if !ids.insert(d.id.clone()) {
                return Err(format!("duplicate recipe id `{}`", d.id));
            }
            Ok(d)
        });
        match checked {
            Ok(d) => out.recipes.push(d),
            Err(message) => {
                log::warn!("{}: {location}: {message}", path.display());
                out.diagnostics.push(Diagnostic { location, message });
            }
        }
    }
    if out.recipes.is_empty() {
        return Err(PipelineError::SchemaViolation {
            path: path.display().to_string(),
            diagnostics: out.diagnostics.iter().map(ToString::to_string).collect(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn jsonl_with_bad_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "r.jsonl",
            "{\"id\":\"a\",\"steps\":[\"Boil water.\"]}\n{\"id\":\"b\",\"steps\":[]}\n{\"id\":\"c\",\"title\":\"C\",\"steps\":[\"Stir.\"]}\n",
        );
        let got = ingest(&p).unwrap();
        assert_eq!(got.recipes.len(), 2);
        assert_eq!(got.diagnostics.len(), 1);
        assert_eq!(got.diagnostics[0].location, "line 2");
        assert!(got.diagnostics[0].message.contains("no steps"));
    }

    #[test]
    fn json_array_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "r.json",
            r#"[{"id":"a","steps":["x"]},{"id":"a","steps":["y"]},{"steps":["z"]}]"#,
        );
        let got = ingest(&p).unwrap();
        assert_eq!(got.recipes.len(), 1);
        assert_eq!(got.diagnostics.len(), 2);
        assert!(got.diagnostics[0].message.contains("duplicate"));
        let bad = write(dir.path(), "bad.jsonl", "{\"id\":\"a\",\"steps\":[]}\n");
        assert!(matches!(
            ingest(&bad),
            Err(PipelineError::SchemaViolation { .. })
        ));
        assert!(matches!(
            ingest(&dir.path().join("none.json")),
            Err(PipelineError::FileNotFound(_))
        ));
    }
}
