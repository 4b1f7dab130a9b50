use std::collections::HashSet;
use std::path::Path;

use serde::Serialize;

use super::{read_file, PipelineError};
use crate::dataset::read_jsonl_lenient;
use crate::metrics::{coverage, diversity, scorer_by_name, CoverageReport, DiversityReport};

/// `(id, question)` pairs from a JSONL file whose objects carry a
/// `question` string. Ids come from `qa_id` or `id`, else the line number.
pub fn read_questions(path: &Path) -> Result<Vec<(String, String)>, PipelineError> {
    let text = read_file(path)?;
    let mut out = Vec::new();
    let mut problems = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let v: serde_json::Value = match serde_json::from_str(line) {
            Ok(v) => v,
            Err(e) => {
                problems.push(format!("line {}: {e}", i + 1));
                continue;
            }
        };
        let Some(q) = v.get("question").and_then(|q| q.as_str()) else {
            problems.push(format!("line {}: no `question` string", i + 1));
            continue;
        };
        let id = ["qa_id", "id"]
            .iter()
            .find_map(|k| v.get(*k).and_then(|x| x.as_str()).map(str::to_string))
            .unwrap_or_else(|| format!("line{}", i + 1));
        out.push((id, q.to_string()));
    }
    if !problems.is_empty() {
        return Err(PipelineError::SchemaViolation {
            path: path.display().to_string(),
            diagnostics: problems,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub generated: usize,
    pub diversity: DiversityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage: Option<CoverageReport>,
}

/// Diversity of the generated questions and, given a reference set, their
/// coverage of it under the named scorer.
pub fn evaluate(
    generated: &Path,
    reference: Option<&Path>,
    scorer: &str,
) -> Result<MetricReport, PipelineError> {
    let scorer = scorer_by_name(scorer)?;
    let gen = read_questions(generated)?;
    let texts: Vec<&str> = gen.iter().map(|(_, q)| q.as_str()).collect();
    let coverage = match reference {
        Some(r) => Some(coverage(&read_questions(r)?, &gen, scorer.as_ref())?),
        None => None,
    };
    Ok(MetricReport {
        generated: gen.len(),
        diversity: diversity(&texts),
        coverage,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub valid: usize,
    pub problems: Vec<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Checks every line of a dataset against the record schema, and qa ids
/// for uniqueness.
pub fn validate_dataset(path: &Path) -> Result<ValidationReport, PipelineError> {
    if !path.exists() {
        return Err(PipelineError::FileNotFound(path.to_path_buf()));
    }
    let (records, problems) = read_jsonl_lenient(path)?;
    let mut report = ValidationReport {
        valid: records.len(),
        problems: problems.iter().map(ToString::to_string).collect(),
    };
    let mut ids = HashSet::new();
    for r in &records {
        if !ids.insert(r.qa_id.as_str()) {
            report
                .problems
                .push(format!("duplicate qa_id `{}`", r.qa_id));
            report.valid -= 1;
        }
    }
    Ok(report)
}
