use std::sync::{Condvar, Mutex};
use std::thread;
use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{BackendClient, BackendConfig, BackendError, Health};

/// Counting semaphore over outstanding requests.
struct Window {
    count: Mutex<usize>,
    freed: Condvar,
    max: usize,
}

struct Permit<'a>(&'a Window);

impl Window {
    fn acquire(&self) -> Permit<'_> {
        let mut n = self.count.lock().unwrap_or_else(|e| e.into_inner());
        while *n >= self.max {
            n = self.freed.wait(n).unwrap_or_else(|e| e.into_inner());
        }
        *n += 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        let mut n = self.0.count.lock().unwrap_or_else(|e| e.into_inner());
        *n -= 1;
        self.0.freed.notify_one();
    }
}

/// Blocking client for the JSON wire protocol, with retries on transport
/// failures and a bounded number of requests in flight.
pub struct HttpClient {
    config: BackendConfig,
    agent: ureq::Agent,
    window: Window,
    api_key: Option<String>,
}

#[derive(Deserialize)]
struct PenmanBody {
    penman: String,
}
#[derive(Deserialize)]
struct TextBody {
    text: String,
}
#[derive(Deserialize)]
struct TextsBody {
    texts: Vec<String>,
}
#[derive(Deserialize)]
struct QuestionsBody {
    questions: Vec<String>,
}
#[derive(Deserialize)]
struct AnswerBody {
    answer: String,
}
#[derive(Deserialize)]
struct ErrorBody {
    error: String,
}

fn map_err(e: ureq::Error) -> BackendError {
    match e {
        ureq::Error::Timeout(_) => BackendError::Timeout,
        ureq::Error::Io(io) if io.kind() == std::io::ErrorKind::TimedOut => BackendError::Timeout,
        ureq::Error::Json(j) => BackendError::Protocol(j.to_string()),
        other => BackendError::Transport(other.to_string()),
    }
}

impl HttpClient {
    pub fn new(config: BackendConfig) -> Result<Self, BackendError> {
        config.validate()?;
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_millis(config.timeout_ms)))
            .http_status_as_error(false)
            .build()
            .into();
        let api_key = config
            .api_key_env
            .as_deref()
            .and_then(|var| std::env::var(var).ok());
        Ok(HttpClient {
            window: Window {
                count: Mutex::new(0),
                freed: Condvar::new(),
                max: config.max_in_flight,
            },
            config,
            agent,
            api_key,
        })
    }

    pub fn config(&self) -> &BackendConfig {
        &self.config
    }

    fn url(&self, route: &str) -> String {
        format!("{}{route}", self.config.endpoint.trim_end_matches('/'))
    }

    fn decode<T: DeserializeOwned>(status: u16, body: &str) -> Result<T, BackendError> {
        match status {
            200..=299 => {
                serde_json::from_str(body).map_err(|e| BackendError::Protocol(e.to_string()))
            }
            422 => match serde_json::from_str::<ErrorBody>(body) {
                Ok(b) => Err(BackendError::Model(b.error)),
                Err(_) => Err(BackendError::Protocol("422 without an error field".into())),
            },
            500..=599 => Err(BackendError::Transport(format!("HTTP {status}"))),
            _ => Err(BackendError::Protocol(format!("unexpected HTTP {status}"))),
        }
    }

    fn once<T: DeserializeOwned>(
        &self,
        route: &str,
        body: Option<&serde_json::Value>,
    ) -> Result<T, BackendError> {
        let _permit = self.window.acquire();
        let url = self.url(route);
        let auth = self.api_key.as_ref().map(|k| format!("Bearer {k}"));
        let sent = match body {
            Some(b) => {
                let mut req = self.agent.post(&url);
                if let Some(a) = &auth {
                    req = req.header("Authorization", a);
                }
                req.send_json(b)
            }
            None => {
                let mut req = self.agent.get(&url);
                if let Some(a) = &auth {
                    req = req.header("Authorization", a);
                }
                req.call()
            }
        };
        let mut resp = sent.map_err(map_err)?;
        let status = resp.status().as_u16();
        let text = resp.body_mut().read_to_string().map_err(map_err)?;
        Self::decode(status, &text)
    }

    fn request<T: DeserializeOwned>(
        &self,
        route: &str,
        body: Option<serde_json::Value>,
    ) -> Result<T, BackendError> {
        let mut attempt = 0;
        loop {
            match self.once(route, body.as_ref()) {
                Err(e) if e.is_retryable() && attempt < self.config.max_retries => {
                    let delay = self.config.backoff_ms.saturating_mul(1 << attempt.min(16));
                    log::debug!("{route}: {e}; retry {} in {delay} ms", attempt + 1);
                    thread::sleep(Duration::from_millis(delay));
                    attempt += 1;
                }
                other => return other,
            }
        }
    }

    fn post<B: Serialize, T: DeserializeOwned>(
        &self,
        route: &str,
        body: B,
    ) -> Result<T, BackendError> {
        let v = serde_json::to_value(body).map_err(|e| BackendError::Protocol(e.to_string()))?;
        self.request(route, Some(v))
    }
}

impl BackendClient for HttpClient {
    fn identity(&self) -> String {
        format!("http:{}", self.config.endpoint)
    }

    fn to_amr(&self, text: &str) -> Result<String, BackendError> {
        self.post::<_, PenmanBody>("/v1/parse", json!({ "text": text }))
            .map(|b| b.penman)
    }

    fn to_text(&self, penman: &str) -> Result<String, BackendError> {
        self.post::<_, TextBody>("/v1/generate", json!({ "penman": penman }))
            .map(|b| b.text)
    }

    fn paraphrase(&self, text: &str, n: usize) -> Result<Vec<String>, BackendError> {
        if n == 0 {
            return Ok(Vec::new());
        }
        self.post::<_, TextsBody>("/v1/paraphrase", json!({ "text": text, "n": n }))
            .map(|b| b.texts)
    }

    fn questions_for_answer(
        &self,
        context: &str,
        answer: &str,
        n: usize,
    ) -> Result<Vec<String>, BackendError> {
        if n == 0 {
            return Ok(Vec::new());
        }
        self.post::<_, QuestionsBody>(
            "/v1/qg_from_answer",
            json!({ "context": context, "answer": answer, "n": n }),
        )
        .map(|b| b.questions)
    }

    fn answer_question(&self, context: &str, question: &str) -> Result<String, BackendError> {
        self.post::<_, AnswerBody>(
            "/v1/answer",
            json!({ "context": context, "question": question }),
        )
        .map(|b| b.answer)
    }

    fn health(&self) -> Result<Health, BackendError> {
        let h: Health = self.request("/v1/health", None)?;
        if h.status != "ok" {
            return Err(BackendError::Model(format!("status `{}`", h.status)));
        }
        Ok(h)
    }
}
