//! Chat-completion backends: the OpenAI-compatible HTTP client, the scripted
//! mock used by tests and offline runs, retry classification, and the token
//! bucket shared by concurrent workers.

use std::path::Path;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

impl ChatMessage {
    pub fn user(content: impl Into<String>) -> Self {
        ChatMessage {
            role: "user".into(),
            content: content.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletionParams {
    pub temperature: f64,
    pub max_tokens: Option<u32>,
}

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("transport error: {message}")]
    Transport { message: String, retryable: bool },
    #[error("http {status}: {body}")]
    Http {
        status: u16,
        body: String,
        retryable: bool,
    },
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("retries exhausted after {attempts} attempts: {last}")]
    Exhausted { attempts: u32, last: String },
}

impl BackendError {
    pub fn is_retryable(&self) -> bool {
        match self {
            BackendError::Transport { retryable, .. } => *retryable,
            BackendError::Http { retryable, .. } => *retryable,
            BackendError::Auth(_) | BackendError::Protocol(_) | BackendError::Exhausted { .. } => {
                false
            }
        }
    }
}

/// A synchronous chat-completion provider. Implementations must be safe for
/// concurrent requests.
pub trait ChatBackend: Send + Sync {
    /// Returns the single assistant text for one completion request.
    fn complete(
        &self,
        model: &str,
        messages: &[ChatMessage],
        params: &CompletionParams,
    ) -> Result<String, BackendError>;
}

/// Retries retryable failures with exponential backoff; permanent failures
/// surface immediately. `max_retries` counts retries, not total attempts.
pub fn complete_with_retry(
    backend: &dyn ChatBackend,
    model: &str,
    messages: &[ChatMessage],
    params: &CompletionParams,
    max_retries: u32,
) -> Result<String, BackendError> {
    let mut last = String::new();
    for attempt in 0..=max_retries {
        match backend.complete(model, messages, params) {
            Ok(text) => return Ok(text),
            Err(e) if e.is_retryable() => {
                last = e.to_string();
                if attempt < max_retries {
                    std::thread::sleep(Duration::from_millis(25 << attempt.min(6)));
                }
            }
            Err(e) => return Err(e),
        }
    }
    Err(BackendError::Exhausted {
        attempts: max_retries + 1,
        last,
    })
}

/// Token bucket limiting request rate across worker threads.
pub struct RateLimiter {
    capacity: f64,
    refill_per_sec: f64,
    state: Mutex<BucketState>,
}

struct BucketState {
    tokens: f64,
    last_refill: Instant,
}

impl RateLimiter {
    pub fn new(requests_per_sec: f64, burst: f64) -> Self {
        RateLimiter {
            capacity: burst.max(1.0),
            refill_per_sec: requests_per_sec.max(0.001),
            state: Mutex::new(BucketState {
                tokens: burst.max(1.0),
                last_refill: Instant::now(),
            }),
        }
    }

    /// Blocks until a token is available.
    pub fn acquire(&self) {
        loop {
            let wait = {
                let mut st = self.state.lock().unwrap();
                let now = Instant::now();
                let elapsed = now.duration_since(st.last_refill).as_secs_f64();
                st.tokens = (st.tokens + elapsed * self.refill_per_sec).min(self.capacity);
                st.last_refill = now;
                if st.tokens >= 1.0 {
                    st.tokens -= 1.0;
                    return;
                }
                (1.0 - st.tokens) / self.refill_per_sec
            };
            std::thread::sleep(Duration::from_secs_f64(wait.min(0.25)));
        }
    }
}

/// OpenAI-compatible chat-completions client.
///
/// Posts `{model, messages, temperature}` to `<base>/chat/completions` with
/// a bearer token, and extracts `choices[0].message.content`.
pub struct HttpBackend {
    base_url: String,
    api_key: Option<String>,
    agent: ureq::Agent,
    limiter: Option<RateLimiter>,
}

impl HttpBackend {
    pub fn new(base_url: impl Into<String>, api_key: Option<String>) -> Self {
        HttpBackend {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            api_key,
            agent: ureq::AgentBuilder::new()
                .timeout(Duration::from_secs(120))
                .build(),
            limiter: None,
        }
    }

    pub fn with_rate_limit(mut self, requests_per_sec: f64, burst: f64) -> Self {
        self.limiter = Some(RateLimiter::new(requests_per_sec, burst));
        self
    }
}

impl ChatBackend for HttpBackend {
    fn complete(
        &self,
        model: &str,
        messages: &[ChatMessage],
        params: &CompletionParams,
    ) -> Result<String, BackendError> {
        if let Some(limiter) = &self.limiter {
            limiter.acquire();
        }

        let mut body = serde_json::json!({
            "model": model,
            "messages": messages,
            "temperature": params.temperature,
        });
        if let Some(max_tokens) = params.max_tokens {
            body["max_tokens"] = max_tokens.into();
        }

        let url = format!("{}/chat/completions", self.base_url);
        let mut request = self.agent.post(&url);
        if let Some(key) = &self.api_key {
            request = request.set("Authorization", &format!("Bearer {key}"));
        }

        let response = match request.send_json(body) {
            Ok(resp) => resp,
            Err(ureq::Error::Status(status, resp)) => {
                let body = resp.into_string().unwrap_or_default();
                return Err(match status {
                    401 | 403 => BackendError::Auth(format!("http {status}: {body}")),
                    429 | 500..=599 => BackendError::Http {
                        status,
                        body,
                        retryable: true,
                    },
                    _ => BackendError::Http {
                        status,
                        body,
                        retryable: false,
                    },
                });
            }
            Err(ureq::Error::Transport(t)) => {
                return Err(BackendError::Transport {
                    message: t.to_string(),
                    retryable: true,
                })
            }
        };

        let value: serde_json::Value = response
            .into_json()
            .map_err(|e| BackendError::Protocol(format!("invalid response JSON: {e}")))?;
        value["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| {
                BackendError::Protocol("response has no choices[0].message.content".into())
            })
    }
}

/// One scripted reply: fires when every `contains` substring appears in the
/// prompt. An empty `contains` list matches anything.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MockRule {
    #[serde(default)]
    pub contains: Vec<String>,
    pub reply: String,
}

/// Deterministic scripted backend. Rules are tried in order; the first match
/// wins. A prompt matching no rule is a permanent error, mimicking a backend
/// that cannot serve the request.
pub struct MockBackend {
    rules: Vec<MockRule>,
}

impl MockBackend {
    pub fn new(rules: Vec<MockRule>) -> Self {
        MockBackend { rules }
    }

    /// Loads rules from a JSONL fixture file, one rule object per line.
    pub fn from_file(path: &Path) -> std::io::Result<Self> {
        let content = std::fs::read_to_string(path)?;
        let mut rules = Vec::new();
        for (idx, line) in content.lines().enumerate() {
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let rule: MockRule = serde_json::from_str(line).map_err(|e| {
                std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    format!("mock fixture line {}: {e}", idx + 1),
                )
            })?;
            rules.push(rule);
        }
        Ok(MockBackend { rules })
    }

    /// Convenience for tests: exact prompt → reply pairs.
    pub fn scripted<I, S, R>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, R)>,
        S: Into<String>,
        R: Into<String>,
    {
        MockBackend {
            rules: pairs
                .into_iter()
                .map(|(prompt, reply)| MockRule {
                    contains: vec![prompt.into()],
                    reply: reply.into(),
                })
                .collect(),
        }
    }
}

impl ChatBackend for MockBackend {
    fn complete(
        &self,
        _model: &str,
        messages: &[ChatMessage],
        _params: &CompletionParams,
    ) -> Result<String, BackendError> {
        let prompt = messages
            .iter()
            .rev()
            .find(|m| m.role == "user")
            .map(|m| m.content.as_str())
            .unwrap_or_default();
        for rule in &self.rules {
            if rule.contains.iter().all(|needle| prompt.contains(needle)) {
                return Ok(rule.reply.clone());
            }
        }
        Err(BackendError::Protocol(format!(
            "no mock rule matched prompt: {prompt:?}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicU32, Ordering};

    struct FlakyBackend {
        failures: AtomicU32,
        permanent: bool,
    }

    impl ChatBackend for FlakyBackend {
        fn complete(
            &self,
            _: &str,
            _: &[ChatMessage],
            _: &CompletionParams,
        ) -> Result<String, BackendError> {
            if self.failures.fetch_update(Ordering::SeqCst, Ordering::SeqCst, |v| {
                v.checked_sub(1)
            }).is_ok()
            {
                if self.permanent {
                    Err(BackendError::Auth("bad key".into()))
                } else {
                    Err(BackendError::Transport {
                        message: "connection reset".into(),
                        retryable: true,
                    })
                }
            } else {
                Ok("ok".into())
            }
        }
    }

    fn params() -> CompletionParams {
        CompletionParams {
            temperature: 0.0,
            max_tokens: None,
        }
    }

    #[test]
    fn mock_matches_first_rule_with_all_substrings() {
        let backend = MockBackend::new(vec![
            MockRule {
                contains: vec!["sentiment".into(), "Dodgers".into()],
                reply: "positive".into(),
            },
            MockRule {
                contains: vec!["sentiment".into()],
                reply: "neutral".into(),
            },
        ]);
        let msg = [ChatMessage::user("classify the sentiment ... Dodgers ...")];
        assert_eq!(backend.complete("m", &msg, &params()).unwrap(), "positive");
        let msg = [ChatMessage::user("classify the sentiment of something else")];
        assert_eq!(backend.complete("m", &msg, &params()).unwrap(), "neutral");
    }

    #[test]
    fn mock_unmatched_prompt_is_permanent_error() {
        let backend = MockBackend::new(vec![]);
        let err = backend
            .complete("m", &[ChatMessage::user("hi")], &params())
            .unwrap_err();
        assert!(!err.is_retryable());
    }

    #[test]
    fn retry_recovers_from_transient_failures() {
        let backend = FlakyBackend {
            failures: AtomicU32::new(2),
            permanent: false,
        };
        let out = complete_with_retry(&backend, "m", &[ChatMessage::user("x")], &params(), 3);
        assert_eq!(out.unwrap(), "ok");
    }

    #[test]
    fn retry_exhaustion_reports_attempts() {
        let backend = FlakyBackend {
            failures: AtomicU32::new(10),
            permanent: false,
        };
        let err = complete_with_retry(&backend, "m", &[ChatMessage::user("x")], &params(), 2)
            .unwrap_err();
        match err {
            BackendError::Exhausted { attempts, .. } => assert_eq!(attempts, 3),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn permanent_errors_fail_fast() {
        let backend = FlakyBackend {
            failures: AtomicU32::new(10),
            permanent: true,
        };
        let err = complete_with_retry(&backend, "m", &[ChatMessage::user("x")], &params(), 5)
            .unwrap_err();
        assert!(matches!(err, BackendError::Auth(_)));
        // fail-fast: only one call consumed
        assert_eq!(backend.failures.load(Ordering::SeqCst), 9);
    }

    #[test]
    fn rate_limiter_spaces_out_acquisitions() {
        let limiter = RateLimiter::new(200.0, 1.0);
        let start = Instant::now();
        for _ in 0..5 {
            limiter.acquire();
        }
        // 4 refills needed at 5ms each; allow generous slack for CI jitter.
        assert!(start.elapsed() >= Duration::from_millis(15));
    }
}
