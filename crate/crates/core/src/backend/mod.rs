//! Boundary to the neural text services, an offline realizer, and the
//! round-trip consistency filter.

pub mod fallback;
mod filter;
mod http;
pub mod prompts;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use fallback::{fallback_realize, realize_answer, realize_question, FallbackError};
pub use filter::{round_trip_filter, score_round_trip, RoundTripPair, Verdict};
pub use http::HttpClient;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BackendError {
    #[error("request timed out")]
    Timeout,
    #[error("transport error: {0}")]
    Transport(String),
    #[error("model error: {0}")]
    Model(String),
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error("invalid backend config: {0}")]
    Config(String),
}

impl BackendError {
    /// Worth another attempt.
    pub fn is_retryable(&self) -> bool {
        matches!(self, BackendError::Timeout | BackendError::Transport(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    #[serde(default)]
    pub models: Vec<String>,
}

/// Text and graph operations offered by a model service.
///
/// Implementations are shared across threads and must not expose mutable
/// state to callers.
pub trait BackendClient: Send + Sync {
    /// Short string recorded in audit entries.
    fn identity(&self) -> String;
    fn to_amr(&self, text: &str) -> Result<String, BackendError>;
    fn to_text(&self, penman: &str) -> Result<String, BackendError>;
    fn paraphrase(&self, text: &str, n: usize) -> Result<Vec<String>, BackendError>;
    fn questions_for_answer(
        &self,
        context: &str,
        answer: &str,
        n: usize,
    ) -> Result<Vec<String>, BackendError>;
    fn answer_question(&self, context: &str, question: &str) -> Result<String, BackendError>;
    fn health(&self) -> Result<Health, BackendError>;
}

fn default_timeout() -> u64 {
    30_000
}
fn default_retries() -> u32 {
    2
}
fn default_in_flight() -> usize {
    4
}
fn default_backoff() -> u64 {
    100
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackendConfig {
    pub endpoint: String,
    #[serde(default = "default_timeout")]
    pub timeout_ms: u64,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    #[serde(default = "default_in_flight")]
    pub max_in_flight: usize,
    /// First retry delay; doubles on each further attempt.
    #[serde(default = "default_backoff")]
    pub backoff_ms: u64,
    /// Name of the environment variable holding a bearer token.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub api_key_env: Option<String>,
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig {
            endpoint: "http://127.0.0.1:8080".to_string(),
            timeout_ms: default_timeout(),
            max_retries: default_retries(),
            max_in_flight: default_in_flight(),
            backoff_ms: default_backoff(),
            api_key_env: None,
        }
    }
}

impl BackendConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        BackendConfig {
            endpoint: endpoint.into(),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), BackendError> {
        if self.timeout_ms == 0 {
            return Err(BackendError::Config("timeout_ms must be positive".into()));
        }
        if self.max_in_flight == 0 {
            return Err(BackendError::Config(
                "max_in_flight must be positive".into(),
            ));
        }
        if !(self.endpoint.starts_with("http://") || self.endpoint.starts_with("https://")) {
            return Err(BackendError::Config(format!(
                "endpoint `{}` is not an http(s) URL",
                self.endpoint
            )));
        }
        Ok(())
    }
}

/// Builds the HTTP client after validating `config`.
pub fn http_client(config: BackendConfig) -> Result<HttpClient, BackendError> {
    HttpClient::new(config)
}
