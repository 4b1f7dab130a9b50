//! Dataset records and their JSONL encoding.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backend::Verdict;
use crate::qgen::Category;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Schema {
        path: String,
        line: usize,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RealizerKind {
    Neural,
    Fallback,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AugmentMethod {
    Paraphrase,
    AnswerBased,
}

/// Audit entry for a question produced by augmentation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentationRecord {
    pub source_qa_id: String,
    pub method: AugmentMethod,
    pub question: String,
    /// Round-trip verdict; absent when no filter applies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    pub backend: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetRecord {
    pub qa_id: String,
    pub recipe_id: String,
    pub question: String,
    pub answer: String,
    pub category: Category,
    /// Absent only for questions written by a language model from an answer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub question_penman: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answer_penman: Option<String>,
    pub sentences: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub augmentation: Option<AugmentationRecord>,
    pub realizer: RealizerKind,
}

impl DatasetRecord {
    /// Problems that make the record unfit for emission.
    pub fn check(&self) -> Result<(), String> {
        if self.qa_id.trim().is_empty() {
            return Err("empty qa_id".into());
        }
        if self.question.trim().is_empty() {
            return Err(format!("{}: empty question", self.qa_id));
        }
        if self.answer.trim().is_empty() {
            return Err(format!("{}: empty answer", self.qa_id));
        }
        if self.question_penman.is_none() && self.augmentation.is_none() {
            return Err(format!("{}: missing question_penman", self.qa_id));
        }
        Ok(())
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Checks every record, then writes one JSON object per line.
pub fn write_jsonl(path: &Path, records: &[DatasetRecord]) -> Result<(), DatasetError> {
    for (i, r) in records.iter().enumerate() {
        r.check().map_err(|message| DatasetError::Schema {
            path: path.display().to_string(),
            line: i + 1,
            message,
        })?;
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(path))?;
    }
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    for r in records {
        serde_json::to_writer(&mut w, r).map_err(|e| io_err(path)(e.into()))?;
        w.write_all(b"\n").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Reads a dataset, failing on the first malformed line.
pub fn read_jsonl(path: &Path) -> Result<Vec<DatasetRecord>, DatasetError> {
    let (records, mut problems) = read_jsonl_lenient(path)?;
    match problems.is_empty() {
        true => Ok(records),
        false => Err(problems.swap_remove(0)),
    }
}

/// Reads a dataset, collecting one diagnostic per bad line.
pub fn read_jsonl_lenient(
    path: &Path,
) -> Result<(Vec<DatasetRecord>, Vec<DatasetError>), DatasetError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut records = Vec::new();
    let mut problems = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let schema = |message: String| DatasetError::Schema {
            path: path.display().to_string(),
            line: i + 1,
            message,
        };
        match serde_json::from_str::<DatasetRecord>(&line) {
            Ok(r) => match r.check() {
                Ok(()) => records.push(r),
                Err(m) => problems.push(schema(m)),
            },
            Err(e) => problems.push(schema(e.to_string())),
        }
    }
    Ok((records, problems))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str) -> DatasetRecord {
        DatasetRecord {
            qa_id: id.into(),
            recipe_id: "r".into(),
            question: "What do you cook?".into(),
            answer: "chicken".into(),
            category: Category::InstructionHow,
            question_penman: Some("(c / cook-01)".into()),
            answer_penman: None,
            sentences: vec![0],
            augmentation: None,
            realizer: RealizerKind::Fallback,
        }
    }

    #[test]
    fn jsonl_round_trip_and_diagnostics() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.jsonl");
        write_jsonl(&p, &[rec("a"), rec("b")]).unwrap();
        assert_eq!(read_jsonl(&p).unwrap(), vec![rec("a"), rec("b")]);
        let text = std::fs::read_to_string(&p).unwrap();
        std::fs::write(&p, format!("{text}{{\"qa_id\": 3}}\n")).unwrap();
        let (ok, bad) = read_jsonl_lenient(&p).unwrap();
        assert_eq!(ok.len(), 2);
        assert!(matches!(bad[0], DatasetError::Schema { line: 3, .. }));
        let mut empty = rec("c");
        empty.answer = " ".into();
        assert!(matches!(
            write_jsonl(&p, &[empty]),
            Err(DatasetError::Schema { line: 1, .. })
        ));
    }
}
