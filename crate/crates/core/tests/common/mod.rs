#![allow(dead_code)]

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread;

use serde_json::Value;

/// A wire-protocol server backed by a closure, one thread per request.
pub struct Stub {
    pub url: String,
    pub hits: Arc<AtomicUsize>,
    pub peak: Arc<AtomicUsize>,
}

pub fn serve<F>(handler: F) -> Stub
where
    F: Fn(&str, &str, Value) -> (u16, Value) + Send + Sync + 'static,
{
    let server = tiny_http::Server::http("127.0.0.1:0").unwrap();
    let url = format!("http://{}", server.server_addr().to_ip().unwrap());
    let hits = Arc::new(AtomicUsize::new(0));
    let peak = Arc::new(AtomicUsize::new(0));
    let live = Arc::new(AtomicUsize::new(0));
    let handler = Arc::new(handler);
    let (h, p) = (hits.clone(), peak.clone());
    thread::spawn(move || {
        for mut req in server.incoming_requests() {
            let (handler, h, p, live) = (handler.clone(), h.clone(), p.clone(), live.clone());
            thread::spawn(move || {
                h.fetch_add(1, Ordering::SeqCst);
                let now = live.fetch_add(1, Ordering::SeqCst) + 1;
                p.fetch_max(now, Ordering::SeqCst);
                let mut body = String::new();
                req.as_reader().read_to_string(&mut body).unwrap();
                let json = serde_json::from_str(&body).unwrap_or(Value::Null);
                let method = req.method().to_string();
                let (status, out) = handler(&method, req.url(), json);
                live.fetch_sub(1, Ordering::SeqCst);
                let resp =
                    tiny_http::Response::from_string(out.to_string()).with_status_code(status);
                let _ = req.respond(resp);
            });
        }
    });
    Stub { url, hits, peak }
}

/// An address nothing listens on.
pub fn dead_url() -> String {
    let l = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = l.local_addr().unwrap();
    drop(l);
    format!("http://{addr}")
}

use graphqa::backend::{BackendClient, BackendError, Health};

type Op<A, R> = Box<dyn Fn(A) -> Result<R, BackendError> + Send + Sync>;

/// A client whose operations are closures; unset operations fail as
/// transport errors.
#[derive(Default)]
pub struct FnClient {
    pub paraphrase: Option<Op<(String, usize), Vec<String>>>,
    pub qg: Option<Op<(String, String, usize), Vec<String>>>,
    pub answer: Option<Op<(String, String), String>>,
    pub to_text: Option<Op<String, String>>,
}

fn down<T>() -> Result<T, BackendError> {
    Err(BackendError::Transport("not configured".into()))
}

impl BackendClient for FnClient {
    fn identity(&self) -> String {
        "fake".into()
    }
    fn to_amr(&self, _: &str) -> Result<String, BackendError> {
        down()
    }
    fn to_text(&self, penman: &str) -> Result<String, BackendError> {
        self.to_text
            .as_ref()
            .map_or_else(down, |f| f(penman.to_string()))
    }
    fn paraphrase(&self, text: &str, n: usize) -> Result<Vec<String>, BackendError> {
        self.paraphrase
            .as_ref()
            .map_or_else(down, |f| f((text.to_string(), n)))
    }
    fn questions_for_answer(
        &self,
        context: &str,
        answer: &str,
        n: usize,
    ) -> Result<Vec<String>, BackendError> {
        self.qg
            .as_ref()
            .map_or_else(down, |f| f((context.to_string(), answer.to_string(), n)))
    }
    fn answer_question(&self, context: &str, question: &str) -> Result<String, BackendError> {
        self.answer
            .as_ref()
            .map_or_else(down, |f| f((context.to_string(), question.to_string())))
    }
    fn health(&self) -> Result<Health, BackendError> {
        down()
    }
}
