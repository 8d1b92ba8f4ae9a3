//! Server configuration, from flags or environment variables.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use clap::Parser;
use puzzlers_core::{bundled_puzzle_set, load_puzzle_set_from_path, AfterGridDefault, PuzzleSet};
use puzzlers_llm::{MockProvider, OpenAiProvider, Provider};

use crate::events::EventLog;
use crate::service::{ServiceSettings, SessionService};

#[derive(Debug, Clone, Parser)]
#[command(name = "puzzlers-server", about = "Puzzle session service")]
pub struct ServerConfig {
    /// Address to listen on.
    #[arg(long, env = "PUZZLERS_BIND", default_value = "127.0.0.1:8080")]
    pub bind: String,

    /// Puzzle manifest; the bundled 12-puzzle set when unset.
    #[arg(long, env = "PUZZLERS_MANIFEST")]
    pub manifest: Option<PathBuf>,

    /// Mock script (JSON array of strings), or `echo`. Selects the mock provider.
    #[arg(long, env = "PUZZLERS_MOCK_SCRIPT")]
    pub mock_script: Option<String>,

    /// Artificial delay for every mock reply, in milliseconds.
    #[arg(long, env = "PUZZLERS_MOCK_DELAY_MS", default_value_t = 0)]
    pub mock_delay_ms: u64,

    /// JSONL research event log.
    #[arg(long, env = "PUZZLERS_EVENT_LOG", default_value = "events.jsonl")]
    pub event_log: PathBuf,

    /// Sessions are appended here as one JSON line on shutdown.
    #[arg(long, env = "PUZZLERS_SNAPSHOT")]
    pub snapshot: Option<PathBuf>,

    /// Initial After grid size: `test-input` or `RxC` (e.g. `3x3`).
    #[arg(long, env = "PUZZLERS_AFTER_DIMS", default_value = "test-input", value_parser = parse_after_dims)]
    pub after_dims: AfterGridDefault,

    /// Only accept models from the built-in registry.
    #[arg(long, env = "PUZZLERS_STRICT_MODELS", default_value_t = true, action = clap::ArgAction::Set)]
    pub strict_models: bool,
}

pub fn parse_after_dims(s: &str) -> Result<AfterGridDefault, String> {
    if s == "test-input" {
        return Ok(AfterGridDefault::MatchTestInput);
    }
    let (r, c) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected `test-input` or RxC, got {s:?}"))?;
    let rows: usize = r.trim().parse().map_err(|_| format!("bad row count {r:?}"))?;
    let cols: usize = c.trim().parse().map_err(|_| format!("bad column count {c:?}"))?;
    if !(1..=30).contains(&rows) || !(1..=30).contains(&cols) {
        return Err(format!("{rows}x{cols} is outside 1..=30"));
    }
    Ok(AfterGridDefault::Fixed { rows, cols })
}

impl ServerConfig {
    pub fn puzzle_set(&self) -> anyhow::Result<PuzzleSet> {
        match &self.manifest {
            Some(path) => Ok(load_puzzle_set_from_path(path)?),
            None => Ok(bundled_puzzle_set()),
        }
    }

    pub fn provider(&self) -> anyhow::Result<Arc<dyn Provider>> {
        match self.mock_script.as_deref() {
            Some("echo") => Ok(Arc::new(
                MockProvider::echo().with_delay(Duration::from_millis(self.mock_delay_ms)),
            )),
            Some(path) => Ok(Arc::new(
                MockProvider::from_script_file(path.as_ref())?
                    .with_delay(Duration::from_millis(self.mock_delay_ms)),
            )),
            None => Ok(Arc::new(OpenAiProvider::from_env())),
        }
    }

    pub fn build(&self) -> anyhow::Result<SessionService> {
        let events = EventLog::with_file(&self.event_log)?;
        Ok(SessionService::with_settings(
            self.puzzle_set()?,
            self.provider()?,
            events,
            ServiceSettings {
                after_default: self.after_dims,
                strict_models: self.strict_models,
            },
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn after_dims_parsing() {
        assert_eq!(parse_after_dims("test-input"), Ok(AfterGridDefault::MatchTestInput));
        assert_eq!(
            parse_after_dims("3x4"),
            Ok(AfterGridDefault::Fixed { rows: 3, cols: 4 })
        );
        assert!(parse_after_dims("31x1").is_err());
        assert!(parse_after_dims("big").is_err());
    }

    #[test]
    fn flags_parse() {
        let cfg = ServerConfig::try_parse_from([
            "puzzlers-server",
            "--mock-script",
            "echo",
            "--strict-models",
            "false",
            "--after-dims",
            "5x5",
        ])
        .unwrap();
        assert!(!cfg.strict_models);
        assert_eq!(cfg.after_dims, AfterGridDefault::Fixed { rows: 5, cols: 5 });
        assert_eq!(cfg.provider().unwrap().name(), "mock");
        assert_eq!(cfg.puzzle_set().unwrap().len(), 12);
    }
}
