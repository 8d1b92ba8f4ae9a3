//! Deterministic offline provider for tests, demos and benchmarks.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use thiserror::Error;

use crate::prompt::TEST_INPUT_LABEL;
use crate::provider::{ChatRequest, Provider, ProviderError, ProviderReply};
use crate::text::{parse_grid_response, serialize_grid};

#[derive(Debug, Error)]
pub enum ScriptError {
    #[error("cannot read mock script {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("mock script must be a JSON array of strings: {0}")]
    Format(#[from] serde_json::Error),
    #[error("mock script is empty")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MockBehavior {
    /// Call k (1-based) returns entry k, wrapping around.
    Script(Vec<String>),
    /// Replies with the serialized test input found in the prompt.
    Echo,
}

/// Scripted provider. A request carrying `request_seed = s` always gets
/// entry `s mod len`; otherwise replies follow the shared call counter.
#[derive(Debug)]
pub struct MockProvider {
    behavior: MockBehavior,
    delay: Duration,
    calls: AtomicU64,
    captured: Mutex<Vec<ChatRequest>>,
}

impl MockProvider {
    pub fn new(behavior: MockBehavior) -> Self {
        MockProvider {
            behavior,
            delay: Duration::ZERO,
            calls: AtomicU64::new(0),
            captured: Mutex::new(Vec::new()),
        }
    }

    pub fn script<S: Into<String>>(entries: impl IntoIterator<Item = S>) -> Result<Self, ScriptError> {
        let entries: Vec<String> = entries.into_iter().map(Into::into).collect();
        if entries.is_empty() {
            return Err(ScriptError::Empty);
        }
        Ok(MockProvider::new(MockBehavior::Script(entries)))
    }

    pub fn echo() -> Self {
        MockProvider::new(MockBehavior::Echo)
    }

    pub fn from_script_json(bytes: &[u8]) -> Result<Self, ScriptError> {
        let entries: Vec<String> = serde_json::from_slice(bytes)?;
        MockProvider::script(entries)
    }

    pub fn from_script_file(path: &Path) -> Result<Self, ScriptError> {
        let bytes = std::fs::read(path).map_err(|source| ScriptError::Io {
            path: path.display().to_string(),
            source,
        })?;
        MockProvider::from_script_json(&bytes)
    }

    /// Sleeps this long on every call and reports it as the latency.
    pub fn with_delay(mut self, delay: Duration) -> Self {
        self.delay = delay;
        self
    }

    pub fn behavior(&self) -> &MockBehavior {
        &self.behavior
    }

    pub fn call_count(&self) -> u64 {
        self.calls.load(Ordering::SeqCst)
    }

    /// Every request received so far, in arrival order.
    pub fn captured(&self) -> Vec<ChatRequest> {
        self.captured.lock().expect("capture lock").clone()
    }

    pub fn last_request(&self) -> Option<ChatRequest> {
        self.captured.lock().expect("capture lock").last().cloned()
    }
}

/// The grid following the test-input label of a prompt, re-serialized.
fn echo_test_input(user_text: &str) -> String {
    user_text
        .find(TEST_INPUT_LABEL)
        .map(|at| &user_text[at + TEST_INPUT_LABEL.len()..])
        .and_then(|rest| parse_grid_response(rest.lines().next().unwrap_or("")).ok())
        .map(|g| serialize_grid(&g))
        .unwrap_or_default()
}

impl Provider for MockProvider {
    fn name(&self) -> &str {
        "mock"
    }

    fn send(&self, request: &ChatRequest) -> Result<ProviderReply, ProviderError> {
        let call = self.calls.fetch_add(1, Ordering::SeqCst) + 1;
        self.captured
            .lock()
            .expect("capture lock")
            .push(request.clone());
        if !self.delay.is_zero() {
            std::thread::sleep(self.delay);
        }
        let text = match &self.behavior {
            MockBehavior::Script(entries) => {
                let slot = match request.request_seed {
                    Some(seed) => seed % entries.len() as u64,
                    None => (call - 1) % entries.len() as u64,
                };
                entries[slot as usize].clone()
            }
            MockBehavior::Echo => echo_test_input(&request.user),
        };
        let mut meta = BTreeMap::new();
        meta.insert("provider".into(), "mock".into());
        meta.insert("call".into(), call.to_string());
        Ok(ProviderReply {
            text,
            latency: Some(self.delay),
            meta,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::provider::default_model;

    fn request(user: &str, seed: Option<u64>) -> ChatRequest {
        ChatRequest {
            model: default_model(),
            system: String::new(),
            user: user.into(),
            temperature: None,
            timeout: Duration::from_secs(1),
            request_seed: seed,
        }
    }

    #[test]
    fn script_sequencing() {
        let mock = MockProvider::script(["a", "b", "c"]).unwrap();
        let texts: Vec<_> = (0..5)
            .map(|_| mock.send(&request("", None)).unwrap().text)
            .collect();
        assert_eq!(texts, ["a", "b", "c", "a", "b"]);
        assert_eq!(mock.send(&request("", Some(7))).unwrap().text, "b");
        assert_eq!(mock.call_count(), 6);
        assert_eq!(mock.captured().len(), 6);
    }

    #[test]
    fn script_loading() {
        let mock = MockProvider::from_script_json(br#"["[[1]]", "no"]"#).unwrap();
        assert_eq!(
            mock.behavior(),
            &MockBehavior::Script(vec!["[[1]]".into(), "no".into()])
        );
        assert!(matches!(
            MockProvider::from_script_json(b"[]"),
            Err(ScriptError::Empty)
        ));
        assert!(matches!(
            MockProvider::from_script_json(b"[1, 2]"),
            Err(ScriptError::Format(_))
        ));
        assert!(matches!(
            MockProvider::from_script_file(Path::new("/definitely/not/here.json")),
            Err(ScriptError::Io { .. })
        ));
    }

    #[test]
    fn echo_returns_test_input() {
        let mock = MockProvider::echo();
        let user = "Before: [[1]]\nAfter: [[2]]\n\nTest input: [[3, 4], [5, 6]]\n\nWhat?";
        assert_eq!(mock.send(&request(user, None)).unwrap().text, "[[3, 4], [5, 6]]");
        assert_eq!(mock.send(&request("nothing", None)).unwrap().text, "");
    }

    #[test]
    fn delay_is_reported() {
        let mock = MockProvider::script(["x"]).unwrap().with_delay(Duration::from_millis(5));
        let reply = mock.send(&request("", None)).unwrap();
        assert_eq!(reply.latency, Some(Duration::from_millis(5)));
    }
}
