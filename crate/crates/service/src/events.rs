//! Append-only research event log.
//!
//! Every state-changing session operation appends exactly one [`Event`].
//! Events are kept in memory per session and, when a log file is
//! configured, written as one JSON object per line and flushed immediately.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use chrono::{DateTime, Duration, Utc};
use parking_lot::Mutex;
use puzzlers_core::{EditAction, Grid, PuzzleSet, Verdict};
use puzzlers_llm::{ModelId, ParseFailureReason, SolveConfig};
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;
use crate::session::{CheckSource, Mode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload")]
pub enum EventPayload {
    SessionCreated {
        puzzle_id: String,
        test_index: usize,
        after: Grid,
        config: SolveConfig,
    },
    ModeSwitched {
        from: Mode,
        to: Mode,
    },
    Edit {
        action: EditAction,
        rows: usize,
        cols: usize,
    },
    Check {
        source: CheckSource,
        attempt_index: Option<usize>,
        verdict: Verdict,
    },
    #[serde(rename = "AISolve")]
    AiSolve {
        attempt_index: usize,
        model: ModelId,
        num_examples: usize,
        hint: Option<String>,
        prompt_sha256: String,
        parsed: bool,
        parse_failure: Option<ParseFailureReason>,
        latency_ms: u64,
    },
    #[serde(rename = "AIExplain")]
    AiExplain {
        attempt_index: Option<usize>,
        model: ModelId,
        explanation: String,
    },
    HintSet {
        hint: Option<String>,
    },
    ConfigChanged {
        model: Option<ModelId>,
        num_examples: Option<usize>,
        config: SolveConfig,
    },
    RandomPuzzleAdded {
        puzzle_id: String,
        rows: usize,
        cols: usize,
        num_train: usize,
        seed: u64,
    },
}

impl EventPayload {
    pub fn kind(&self) -> &'static str {
        match self {
            EventPayload::SessionCreated { .. } => "SessionCreated",
            EventPayload::ModeSwitched { .. } => "ModeSwitched",
            EventPayload::Edit { .. } => "Edit",
            EventPayload::Check { .. } => "Check",
            EventPayload::AiSolve { .. } => "AISolve",
            EventPayload::AiExplain { .. } => "AIExplain",
            EventPayload::HintSet { .. } => "HintSet",
            EventPayload::ConfigChanged { .. } => "ConfigChanged",
            EventPayload::RandomPuzzleAdded { .. } => "RandomPuzzleAdded",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub session_id: String,
    /// Position in the session's log, starting at 0.
    pub seq: u64,
    pub timestamp: DateTime<Utc>,
    #[serde(flatten)]
    pub payload: EventPayload,
}

#[derive(Default)]
struct LogInner {
    by_session: HashMap<String, Vec<Event>>,
    file: Option<File>,
}

/// Thread-safe event log shared by all sessions.
#[derive(Default)]
pub struct EventLog {
    inner: Mutex<LogInner>,
}

impl EventLog {
    pub fn in_memory() -> EventLog {
        EventLog::default()
    }

    /// Appends to (creating if needed) a JSONL file.
    pub fn with_file(path: &Path) -> std::io::Result<EventLog> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(EventLog {
            inner: Mutex::new(LogInner {
                by_session: HashMap::new(),
                file: Some(file),
            }),
        })
    }

    /// Records an event. Timestamps are strictly increasing per session.
    pub fn append(&self, session_id: &str, payload: EventPayload) -> Event {
        let mut inner = self.inner.lock();
        let events = inner.by_session.entry(session_id.to_string()).or_default();
        let mut timestamp = Utc::now();
        if let Some(last) = events.last() {
            if timestamp <= last.timestamp {
                timestamp = last.timestamp + Duration::microseconds(1);
            }
        }
        let event = Event {
            session_id: session_id.to_string(),
            seq: events.len() as u64,
            timestamp,
            payload,
        };
        events.push(event.clone());
        if let Some(file) = inner.file.as_mut() {
            let line = serde_json::to_string(&event).expect("events serialize");
            if let Err(e) = writeln!(file, "{line}").and_then(|_| file.flush()) {
                tracing::error!("event log write failed: {e}");
            }
        }
        event
    }

    pub fn read(&self, session_id: &str) -> Vec<Event> {
        self.inner
            .lock()
            .by_session
            .get(session_id)
            .cloned()
            .unwrap_or_default()
    }
}

/// Reads a JSONL event log back.
pub fn read_jsonl(path: &Path) -> std::io::Result<Vec<Event>> {
    let reader = BufReader::new(File::open(path)?);
    reader
        .lines()
        .filter(|l| !matches!(l, Ok(s) if s.trim().is_empty()))
        .map(|line| {
            let line = line?;
            serde_json::from_str(&line)
                .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
        })
        .collect()
}

/// Session state rebuilt from its events alone.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayedSession {
    pub puzzle_id: String,
    pub mode: Mode,
    pub after: Grid,
    pub config: SolveConfig,
}

/// Replays one session's events from scratch.
pub fn replay(events: &[Event], puzzles: &PuzzleSet) -> Result<ReplayedSession, ServiceError> {
    let mut iter = events.iter();
    let mut state = match iter.next().map(|e| &e.payload) {
        Some(EventPayload::SessionCreated {
            puzzle_id,
            after,
            config,
            ..
        }) => ReplayedSession {
            puzzle_id: puzzle_id.clone(),
            mode: Mode::Manual,
            after: after.clone(),
            config: config.clone(),
        },
        _ => {
            return Err(ServiceError::InvalidRequest(
                "event log does not start with SessionCreated".into(),
            ))
        }
    };
    let test_index = match &events[0].payload {
        EventPayload::SessionCreated { test_index, .. } => *test_index,
        _ => unreachable!(),
    };
    let puzzle = puzzles
        .get(&state.puzzle_id)
        .ok_or_else(|| ServiceError::UnknownPuzzle(state.puzzle_id.clone()))?;
    let before = puzzle.test_pair(test_index)?.input.clone();

    for event in iter {
        match &event.payload {
            EventPayload::ModeSwitched { to, .. } => state.mode = *to,
            EventPayload::Edit { action, .. } => state.after = action.apply(&state.after, &before)?,
            EventPayload::HintSet { hint } => state.config.hint = hint.clone(),
            EventPayload::ConfigChanged { config, .. } => state.config = config.clone(),
            EventPayload::SessionCreated { .. } => {
                return Err(ServiceError::InvalidRequest("duplicate SessionCreated".into()))
            }
            EventPayload::Check { .. }
            | EventPayload::AiSolve { .. }
            | EventPayload::AiExplain { .. }
            | EventPayload::RandomPuzzleAdded { .. } => {}
        }
    }
    Ok(state)
}
