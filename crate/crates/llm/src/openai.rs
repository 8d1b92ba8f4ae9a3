//! Client for OpenAI-compatible `/chat/completions` endpoints.

use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::Duration;

use serde::Deserialize;
use serde_json::json;

use crate::provider::{ChatRequest, Provider, ProviderError, ProviderReply};

pub const API_KEY_ENV: &str = "OPENAI_API_KEY";
pub const BASE_URL_ENV: &str = "OPENAI_BASE_URL";
pub const DEFAULT_BASE_URL: &str = "https://api.openai.com/v1";

const MAX_RETRIES: u32 = 2;

pub struct OpenAiProvider {
    base_url: String,
    api_key: Option<String>,
    backoff: Duration,
    // Built on first use so construction never touches an async runtime.
    client: OnceLock<reqwest::blocking::Client>,
}

#[derive(Deserialize)]
struct CompletionBody {
    #[serde(default)]
    id: Option<String>,
    #[serde(default)]
    model: Option<String>,
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: Message,
    #[serde(default)]
    finish_reason: Option<String>,
}

#[derive(Deserialize)]
struct Message {
    #[serde(default)]
    content: Option<String>,
}

impl OpenAiProvider {
    pub fn new(base_url: impl Into<String>, api_key: Option<String>) -> Self {
        OpenAiProvider {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            api_key: api_key.filter(|k| !k.trim().is_empty()),
            backoff: Duration::from_millis(500),
            client: OnceLock::new(),
        }
    }

    /// Reads `OPENAI_BASE_URL` and `OPENAI_API_KEY`. A missing key is only
    /// reported when a request is made.
    pub fn from_env() -> Self {
        let base = std::env::var(BASE_URL_ENV).unwrap_or_else(|_| DEFAULT_BASE_URL.to_string());
        OpenAiProvider::new(base, std::env::var(API_KEY_ENV).ok())
    }

    /// First retry waits `backoff`, the second twice that.
    pub fn with_backoff(mut self, backoff: Duration) -> Self {
        self.backoff = backoff;
        self
    }

    pub fn endpoint(&self) -> String {
        format!("{}/chat/completions", self.base_url)
    }

    fn client(&self) -> &reqwest::blocking::Client {
        self.client.get_or_init(reqwest::blocking::Client::new)
    }

    fn send_once(&self, key: &str, request: &ChatRequest) -> Result<ProviderReply, ProviderError> {
        let mut body = json!({
            "model": request.model.as_str(),
            "messages": [
                {"role": "system", "content": request.system},
                {"role": "user", "content": request.user},
            ],
        });
        if let Some(t) = request.temperature {
            body["temperature"] = json!(t);
        }

        let classify = |e: reqwest::Error| {
            if e.is_timeout() {
                ProviderError::Timeout(request.timeout)
            } else {
                ProviderError::Transport(e.to_string())
            }
        };
        let response = self
            .client()
            .post(self.endpoint())
            .bearer_auth(key)
            .timeout(request.timeout)
            .json(&body)
            .send()
            .map_err(classify)?;
        let status = response.status();
        let text = response.text().map_err(classify)?;
        if !status.is_success() {
            return Err(ProviderError::ProviderRefusal {
                status: status.as_u16(),
                body: text,
            });
        }
        let parsed: CompletionBody = serde_json::from_str(&text)
            .map_err(|e| ProviderError::Transport(format!("unreadable completion body: {e}")))?;
        let choice = parsed
            .choices
            .into_iter()
            .next()
            .ok_or_else(|| ProviderError::Transport("completion has no choices".into()))?;

        let mut meta = BTreeMap::new();
        meta.insert("provider".into(), "openai".into());
        if let Some(id) = parsed.id {
            meta.insert("response_id".into(), id);
        }
        if let Some(model) = parsed.model {
            meta.insert("served_model".into(), model);
        }
        if let Some(reason) = choice.finish_reason {
            meta.insert("finish_reason".into(), reason);
        }
        Ok(ProviderReply {
            text: choice.message.content.unwrap_or_default(),
            latency: None,
            meta,
        })
    }
}

impl Provider for OpenAiProvider {
    fn name(&self) -> &str {
        "openai"
    }

    fn send(&self, request: &ChatRequest) -> Result<ProviderReply, ProviderError> {
        let key = self
            .api_key
            .as_deref()
            .ok_or(ProviderError::CredentialMissing(API_KEY_ENV))?;
        let mut attempt = 0;
        loop {
            match self.send_once(key, request) {
                Err(ProviderError::Transport(msg)) if attempt < MAX_RETRIES => {
                    let wait = self.backoff * 2u32.pow(attempt);
                    tracing::warn!(attempt, ?wait, "transport error, retrying: {msg}");
                    std::thread::sleep(wait);
                    attempt += 1;
                }
                other => return other,
            }
        }
    }
}
