//! Chat-completion transport: request types, the gateway trait and an
//! HTTP client for OpenAI-compatible servers.

use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::LlmError;

pub const DEFAULT_CONTEXT_TOKENS: u32 = 16384;
pub const DEFAULT_CONCURRENCY: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChatRequest {
    /// Template the prompt was rendered from; routing metadata only, never
    /// sent over the wire.
    #[serde(skip)]
    pub template: String,
    pub model: String,
    pub messages: Vec<Message>,
    pub temperature: f64,
    #[serde(skip)]
    pub max_context_tokens: u32,
}

impl ChatRequest {
    /// A single user turn at temperature 0.
    pub fn user(template: &str, model: &str, prompt: String) -> Self {
        Self {
            template: template.to_string(),
            model: model.to_string(),
            messages: vec![Message {
                role: Role::User,
                content: prompt,
            }],
            temperature: 0.0,
            max_context_tokens: DEFAULT_CONTEXT_TOKENS,
        }
    }

    pub fn validate(&self) -> Result<(), LlmError> {
        if self.messages.is_empty() {
            return Err(LlmError::InvalidRequest("no messages".into()));
        }
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(LlmError::InvalidRequest(format!(
                "temperature {} outside [0, 2]",
                self.temperature
            )));
        }
        Ok(())
    }

    /// Content of the last user message.
    pub fn prompt(&self) -> &str {
        self.messages
            .iter()
            .rev()
            .find(|m| m.role == Role::User)
            .map_or("", |m| m.content.as_str())
    }
}

/// Anything that answers chat requests. Implementations must be usable
/// from several worker threads at once.
pub trait ChatGateway: Send + Sync {
    fn chat(&self, request: &ChatRequest) -> Result<String, LlmError>;
}

/// Counting semaphore bounding in-flight requests.
#[derive(Debug)]
struct Limiter {
    free: Mutex<usize>,
    released: Condvar,
}

impl Limiter {
    fn new(n: usize) -> Self {
        Self {
            free: Mutex::new(n.max(1)),
            released: Condvar::new(),
        }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut free = self.free.lock().unwrap_or_else(|e| e.into_inner());
        while *free == 0 {
            free = self.released.wait(free).unwrap_or_else(|e| e.into_inner());
        }
        *free -= 1;
        Permit(self)
    }
}

struct Permit<'a>(&'a Limiter);

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().unwrap_or_else(|e| e.into_inner()) += 1;
        self.0.released.notify_one();
    }
}

/// Client for `POST {base_url}/chat/completions`.
#[derive(Debug)]
pub struct HttpGateway {
    base_url: String,
    api_key: Option<String>,
    agent: ureq::Agent,
    limiter: Limiter,
}

impl HttpGateway {
    pub fn new(base_url: &str, api_key: Option<String>, timeout: Duration, concurrency: usize) -> Self {
        Self {
            base_url: base_url.trim_end_matches('/').to_string(),
            api_key,
            agent: ureq::AgentBuilder::new().timeout(timeout).build(),
            limiter: Limiter::new(concurrency),
        }
    }

    /// Reads `LLM_BASE_URL` and `LLM_API_KEY`.
    pub fn from_env(timeout: Duration, concurrency: usize) -> Result<Self, LlmError> {
        let base = std::env::var("LLM_BASE_URL")
            .map_err(|_| LlmError::InvalidRequest("LLM_BASE_URL is not set".into()))?;
        let key = std::env::var("LLM_API_KEY").ok().filter(|k| !k.is_empty());
        Ok(Self::new(&base, key, timeout, concurrency))
    }

    pub fn endpoint(&self) -> String {
        format!("{}/chat/completions", self.base_url)
    }
}

/// Request body in the chat-completions schema.
pub fn request_body(request: &ChatRequest) -> Value {
    json!({
        "model": request.model,
        "messages": request.messages,
        "temperature": request.temperature,
    })
}

/// `choices[0].message.content` of a chat-completions response.
pub fn response_content(body: &Value) -> Result<String, LlmError> {
    body.pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| LlmError::MalformedResponse("missing choices[0].message.content".into()))
}

impl ChatGateway for HttpGateway {
    fn chat(&self, request: &ChatRequest) -> Result<String, LlmError> {
        request.validate()?;
        let _permit = self.limiter.acquire();
        let mut call = self.agent.post(&self.endpoint());
        if let Some(key) = &self.api_key {
            call = call.set("Authorization", &format!("Bearer {key}"));
        }
        match call.send_json(request_body(request)) {
            Ok(resp) => {
                let body: Value = resp
                    .into_json()
                    .map_err(|e| LlmError::MalformedResponse(e.to_string()))?;
                response_content(&body)
            }
            Err(ureq::Error::Status(code, resp)) => {
                let detail = resp.into_string().unwrap_or_default();
                Err(LlmError::HttpStatus(code, detail.chars().take(200).collect()))
            }
            Err(ureq::Error::Transport(t)) => {
                let message = t.to_string();
                if message.contains("timed out") {
                    Err(LlmError::Timeout)
                } else {
                    Err(LlmError::Network(message))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn request_defaults_and_body() {
        let r = ChatRequest::user("parser_initial", "qwen3-4b", "hello".into());
        assert_eq!(r.temperature, 0.0);
        assert_eq!(r.max_context_tokens, 16384);
        assert_eq!(
            request_body(&r),
            json!({"model": "qwen3-4b", "messages": [{"role": "user", "content": "hello"}], "temperature": 0.0})
        );
    }

    #[test]
    fn validation() {
        let mut r = ChatRequest::user("t", "m", "x".into());
        r.temperature = 2.5;
        assert!(r.validate().is_err());
        r.temperature = 0.6;
        r.messages.clear();
        assert!(r.validate().is_err());
    }

    #[test]
    fn response_parsing() {
        let body = json!({"choices": [{"message": {"role": "assistant", "content": "hi"}}]});
        assert_eq!(response_content(&body).unwrap(), "hi");
        assert!(matches!(response_content(&json!({})), Err(LlmError::MalformedResponse(_))));
    }

    #[test]
    fn unreachable_endpoint_is_network_error() {
        // Port 9 on localhost is the discard service and normally closed.
        let g = HttpGateway::new("http://127.0.0.1:9/v1", None, Duration::from_secs(2), 1);
        let err = g.chat(&ChatRequest::user("t", "m", "x".into())).unwrap_err();
        assert!(matches!(err, LlmError::Network(_) | LlmError::Timeout), "{err:?}");
    }

    #[test]
    fn limiter_bounds_concurrency() {
        use std::sync::atomic::{AtomicUsize, Ordering};
        let limiter = Limiter::new(2);
        let active = AtomicUsize::new(0);
        let peak = AtomicUsize::new(0);
        std::thread::scope(|s| {
            for _ in 0..8 {
                s.spawn(|| {
                    let _p = limiter.acquire();
                    let now = active.fetch_add(1, Ordering::SeqCst) + 1;
                    peak.fetch_max(now, Ordering::SeqCst);
                    std::thread::sleep(Duration::from_millis(10));
                    active.fetch_sub(1, Ordering::SeqCst);
                });
            }
        });
        assert!(peak.load(Ordering::SeqCst) <= 2);
    }
}
