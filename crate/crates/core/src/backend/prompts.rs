//! LLM prompt templates. Placeholders are `{UPPER_CASE}` names.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("unknown prompt `{0}`")]
    UnknownPrompt(String),
    #[error("placeholder {{{0}}} has no binding")]
    UnboundPlaceholder(String),
    #[error("unterminated placeholder at byte {0}")]
    Unterminated(usize),
    #[error("reading prompt file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub const GPT3_SENTENCE: &str = "gpt3_sentence";
pub const GPT3_RECIPE: &str = "gpt3_recipe";
pub const PARAPHRASE: &str = "paraphrase";
pub const GPT3_QG: &str = "gpt3_qg";
pub const ANSWER: &str = "answer";

const BUILTIN: [(&str, &str); 5] = [
    (
        GPT3_SENTENCE,
        include_str!("../../data/prompts/gpt3_sentence.txt"),
    ),
    (
        GPT3_RECIPE,
        include_str!("../../data/prompts/gpt3_recipe.txt"),
    ),
    (
        PARAPHRASE,
        include_str!("../../data/prompts/paraphrase.txt"),
    ),
    (GPT3_QG, include_str!("../../data/prompts/gpt3_qg.txt")),
    (ANSWER, include_str!("../../data/prompts/answer.txt")),
];

fn clean(text: &str) -> String {
    text.strip_suffix('\n').unwrap_or(text).to_string()
}

/// Substitutes every `{NAME}` in `template`.
pub fn render(template: &str, bindings: &[(&str, &str)]) -> Result<String, PromptError> {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    let mut offset = 0;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let close = after
            .find('}')
            .ok_or(PromptError::Unterminated(offset + open))?;
        let name = &after[..close];
        let value = bindings
            .iter()
            .find(|(k, _)| *k == name)
            .map(|(_, v)| *v)
            .ok_or_else(|| PromptError::UnboundPlaceholder(name.to_string()))?;
        out.push_str(value);
        offset += open + close + 2;
        rest = &after[close + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct PromptSet {
    templates: BTreeMap<String, String>,
}

impl Default for PromptSet {
    fn default() -> Self {
        PromptSet {
            templates: BUILTIN
                .iter()
                .map(|(k, v)| (k.to_string(), clean(v)))
                .collect(),
        }
    }
}

impl PromptSet {
    /// Built-in prompts overridden by any `<id>.txt` found in `dir`.
    pub fn load_dir(dir: &Path) -> Result<Self, PromptError> {
        let mut set = PromptSet::default();
        let io = |source| PromptError::Io {
            path: dir.display().to_string(),
            source,
        };
        for entry in fs::read_dir(dir).map_err(io)? {
            let path = entry.map_err(io)?.path();
            if path.extension().is_some_and(|e| e == "txt") {
                let id = path
                    .file_stem()
                    .unwrap_or_default()
                    .to_string_lossy()
                    .into_owned();
                let text = fs::read_to_string(&path).map_err(|source| PromptError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                set.templates.insert(id, clean(&text));
            }
        }
        Ok(set)
    }

    pub fn template(&self, id: &str) -> Result<&str, PromptError> {
        self.templates
            .get(id)
            .map(String::as_str)
            .ok_or_else(|| PromptError::UnknownPrompt(id.to_string()))
    }

    pub fn render(&self, id: &str, bindings: &[(&str, &str)]) -> Result<String, PromptError> {
        render(self.template(id)?, bindings)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.templates.keys().map(String::as_str)
    }
}
