use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::prompt::{Prompt, SolveConfig};

/// Opaque model identifier, passed to the provider verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ModelId(String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("model id must not be empty")]
pub struct EmptyModelId;

impl ModelId {
    pub fn new(id: impl Into<String>) -> Result<ModelId, EmptyModelId> {
        let id = id.into();
        if id.trim().is_empty() {
            Err(EmptyModelId)
        } else {
            Ok(ModelId(id))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_registered(&self) -> bool {
        MODEL_REGISTRY.iter().any(|m| m.id == self.0)
    }
}

impl TryFrom<String> for ModelId {
    type Error = EmptyModelId;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        ModelId::new(value)
    }
}

impl From<ModelId> for String {
    fn from(id: ModelId) -> String {
        id.0
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModelInfo {
    pub label: &'static str,
    pub id: &'static str,
}

/// Models offered in the model selector. No capabilities are assumed per model.
pub const MODEL_REGISTRY: &[ModelInfo] = &[
    ModelInfo {
        label: "GPT-4o",
        id: "gpt-4o",
    },
    ModelInfo {
        label: "GPT-4o-Mini",
        id: "gpt-4o-mini",
    },
    ModelInfo {
        label: "GPT-3.5-turbo",
        id: "gpt-3.5-turbo",
    },
    ModelInfo {
        label: "GPT-4o-Turbo",
        id: "gpt-4-turbo",
    },
];

pub const DEFAULT_MODEL: &str = "gpt-4o";

pub fn default_model() -> ModelId {
    ModelId::new(DEFAULT_MODEL).expect("non-empty")
}

/// Everything a provider needs for one chat-completion call.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChatRequest {
    pub model: ModelId,
    pub system: String,
    pub user: String,
    pub temperature: Option<f64>,
    pub timeout: Duration,
    pub request_seed: Option<u64>,
}

impl ChatRequest {
    pub fn new(prompt: &Prompt, config: &SolveConfig) -> ChatRequest {
        ChatRequest {
            model: config.model.clone(),
            system: prompt.system_text.clone(),
            user: prompt.user_text.clone(),
            temperature: config.sampling_temperature,
            timeout: config.timeout,
            request_seed: config.request_seed,
        }
    }
}

/// What a provider hands back before timing is attached.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProviderReply {
    pub text: String,
    /// Providers that simulate latency report it here instead of having it measured.
    pub latency: Option<Duration>,
    pub meta: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProviderError {
    #[error("provider timed out after {0:?}")]
    Timeout(Duration),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("provider refused the request with status {status}: {body}")]
    ProviderRefusal { status: u16, body: String },
    #[error("no provider credential configured (set {0})")]
    CredentialMissing(&'static str),
}

impl ProviderError {
    pub fn code(&self) -> &'static str {
        match self {
            ProviderError::Timeout(_) => "provider_timeout",
            ProviderError::Transport(_) => "transport_error",
            ProviderError::ProviderRefusal { .. } => "provider_refusal",
            ProviderError::CredentialMissing(_) => "credential_missing",
        }
    }
}

/// A chat-completion backend. Implementations must be shareable across threads.
pub trait Provider: Send + Sync {
    fn name(&self) -> &str;

    fn send(&self, request: &ChatRequest) -> Result<ProviderReply, ProviderError>;
}

impl<P: Provider + ?Sized> Provider for std::sync::Arc<P> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn send(&self, request: &ChatRequest) -> Result<ProviderReply, ProviderError> {
        (**self).send(request)
    }
}

/// The provider's reply to one prompt, captured verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawResponse {
    pub text: String,
    pub model: ModelId,
    #[serde(with = "duration_ms", rename = "latency_ms")]
    pub latency: Duration,
    pub provider_meta: BTreeMap<String, String>,
}

/// Sends one prompt and records the reply with its latency.
pub fn complete(
    prompt: &Prompt,
    config: &SolveConfig,
    provider: &dyn Provider,
) -> Result<RawResponse, ProviderError> {
    let request = ChatRequest::new(prompt, config);
    let started = Instant::now();
    let reply = provider.send(&request)?;
    let latency = reply.latency.unwrap_or_else(|| started.elapsed());
    let mut provider_meta = reply.meta;
    provider_meta
        .entry("provider".into())
        .or_insert_with(|| provider.name().to_string());
    Ok(RawResponse {
        text: reply.text,
        model: config.model.clone(),
        latency,
        provider_meta,
    })
}

pub(crate) mod duration_ms {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_millis(u64::deserialize(d)?))
    }
}
