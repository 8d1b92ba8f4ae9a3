//! Session operations, independent of the HTTP transport.
//!
//! Each session sits behind its own lock so operations on one session are
//! linearized while different sessions proceed independently. Provider calls
//! run outside the lock; a per-session flag admits one AI call at a time.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;

use chrono::Utc;
use parking_lot::{Mutex, RwLock};
use puzzlers_core::{
    check_solution, generate_random_puzzle, AfterGridDefault, EditAction, Puzzle, PuzzleSet,
    PuzzleSummary, Verdict,
};
use puzzlers_llm::{check_examples, explain, solve, AIAttempt, ModelId, Provider, SolveConfig};
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;
use crate::events::{Event, EventLog, EventPayload};
use crate::session::{CheckSource, Mode, Session};

type Result<T, E = ServiceError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ServiceSettings {
    pub after_default: AfterGridDefault,
    /// Reject models outside the registry.
    pub strict_models: bool,
}

impl Default for ServiceSettings {
    fn default() -> Self {
        ServiceSettings {
            after_default: AfterGridDefault::MatchTestInput,
            strict_models: true,
        }
    }
}

struct SessionSlot {
    state: Mutex<Session>,
    ai_in_flight: AtomicBool,
}

/// Clears the in-flight flag however the AI call ends.
struct FlightGuard<'a>(&'a AtomicBool);

impl Drop for FlightGuard<'_> {
    fn drop(&mut self) {
        self.0.store(false, Ordering::SeqCst);
    }
}

impl SessionSlot {
    fn begin_flight(&self) -> Result<FlightGuard<'_>> {
        self.ai_in_flight
            .compare_exchange(false, true, Ordering::SeqCst, Ordering::SeqCst)
            .map_err(|_| ServiceError::Busy)?;
        Ok(FlightGuard(&self.ai_in_flight))
    }
}

/// Body of `PUT /sessions/{id}/config`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigUpdate {
    pub model: Option<ModelId>,
    pub num_examples: Option<usize>,
}

/// Body of `POST /puzzles/random`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomPuzzleRequest {
    pub session_id: String,
    pub rows: usize,
    pub cols: usize,
    pub num_train: usize,
    pub seed: u64,
}

pub struct SessionService {
    puzzles: RwLock<PuzzleSet>,
    sessions: RwLock<HashMap<String, Arc<SessionSlot>>>,
    provider: Arc<dyn Provider>,
    events: EventLog,
    settings: ServiceSettings,
    random_counter: AtomicU64,
}

impl SessionService {
    pub fn new(puzzles: PuzzleSet, provider: Arc<dyn Provider>, events: EventLog) -> Self {
        SessionService::with_settings(puzzles, provider, events, ServiceSettings::default())
    }

    pub fn with_settings(
        puzzles: PuzzleSet,
        provider: Arc<dyn Provider>,
        events: EventLog,
        settings: ServiceSettings,
    ) -> Self {
        if puzzles.is_empty() {
            tracing::warn!("puzzle set is empty; no sessions can be created");
        }
        SessionService {
            puzzles: RwLock::new(puzzles),
            sessions: RwLock::new(HashMap::new()),
            provider,
            events,
            settings,
            random_counter: AtomicU64::new(0),
        }
    }

    pub fn settings(&self) -> &ServiceSettings {
        &self.settings
    }

    fn slot(&self, session_id: &str) -> Result<Arc<SessionSlot>> {
        self.sessions
            .read()
            .get(session_id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownSession(session_id.to_string()))
    }

    fn puzzle(&self, puzzle_id: &str) -> Result<Puzzle> {
        self.puzzles
            .read()
            .get(puzzle_id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownPuzzle(puzzle_id.to_string()))
    }

    fn log(&self, session: &mut Session, payload: EventPayload) -> Event {
        let event = self.events.append(&session.id, payload);
        session.updated = event.timestamp;
        event
    }

    pub fn list_puzzles(&self) -> Vec<PuzzleSummary> {
        self.puzzles.read().summaries()
    }

    pub fn get_puzzle(&self, puzzle_id: &str) -> Result<Puzzle> {
        self.puzzle(puzzle_id)
    }

    pub fn get_session(&self, session_id: &str) -> Result<Session> {
        Ok(self.slot(session_id)?.state.lock().clone())
    }

    pub fn read_events(&self, session_id: &str) -> Result<Vec<Event>> {
        self.slot(session_id)?;
        Ok(self.events.read(session_id))
    }

    pub fn sessions(&self) -> Vec<Session> {
        let mut all: Vec<Session> = self
            .sessions
            .read()
            .values()
            .map(|slot| slot.state.lock().clone())
            .collect();
        all.sort_by(|a, b| a.created.cmp(&b.created).then_with(|| a.id.cmp(&b.id)));
        all
    }

    /// Starts a Manual-mode session on test pair `test_index` of a puzzle.
    pub fn create_session(&self, puzzle_id: &str, test_index: usize) -> Result<Session> {
        let puzzle = self.puzzle(puzzle_id)?;
        let after = self.settings.after_default.initial_after(&puzzle, test_index)?;
        let now = Utc::now();
        let mut session = Session {
            id: uuid::Uuid::new_v4().to_string(),
            mode: Mode::Manual,
            puzzle_id: puzzle.id.clone(),
            test_index,
            after: after.clone(),
            attempts: Vec::new(),
            config: SolveConfig::for_puzzle(&puzzle),
            created: now,
            updated: now,
        };
        let config = session.config.clone();
        self.log(
            &mut session,
            EventPayload::SessionCreated {
                puzzle_id: puzzle.id,
                test_index,
                after,
                config,
            },
        );
        session.created = session.updated;
        self.sessions.write().insert(
            session.id.clone(),
            Arc::new(SessionSlot {
                state: Mutex::new(session.clone()),
                ai_in_flight: AtomicBool::new(false),
            }),
        );
        Ok(session)
    }

    pub fn switch_mode(&self, session_id: &str, mode: Mode) -> Result<Session> {
        let slot = self.slot(session_id)?;
        let mut session = slot.state.lock();
        if session.mode != mode {
            let from = session.mode;
            session.mode = mode;
            self.log(&mut session, EventPayload::ModeSwitched { from, to: mode });
        }
        Ok(session.clone())
    }

    /// Applies a Manual-mode tool to the After grid. A failed edit changes nothing.
    pub fn apply_edit(&self, session_id: &str, action: EditAction) -> Result<Session> {
        let slot = self.slot(session_id)?;
        let mut session = slot.state.lock();
        let puzzle = self.puzzle(&session.puzzle_id)?;
        let before = &puzzle.test_pair(session.test_index)?.input;
        let after = action.apply(&session.after, before)?;
        let (rows, cols) = after.dims();
        session.after = after;
        self.log(&mut session, EventPayload::Edit { action, rows, cols });
        Ok(session.clone())
    }

    pub fn check(&self, session_id: &str, source: CheckSource) -> Result<Verdict> {
        let slot = self.slot(session_id)?;
        let mut session = slot.state.lock();
        let puzzle = self.puzzle(&session.puzzle_id)?;
        let test_index = session.test_index;
        let (verdict, attempt_index) = match source {
            CheckSource::Human => (check_solution(&session.after, &puzzle, test_index)?, None),
            CheckSource::LastAiAttempt => {
                let index = session
                    .attempts
                    .len()
                    .checked_sub(1)
                    .ok_or(ServiceError::NoAttempt)?;
                let attempt = &mut session.attempts[index];
                let grid = attempt.grid().ok_or(ServiceError::UnparsedAttempt)?;
                let verdict = check_solution(grid, &puzzle, test_index)?;
                attempt.verdict = Some(verdict);
                (verdict, Some(index))
            }
        };
        self.log(
            &mut session,
            EventPayload::Check {
                source,
                attempt_index,
                verdict,
            },
        );
        Ok(verdict)
    }

    /// Asks the provider to solve the session's puzzle. The answer is
    /// appended to `attempts`; the player's After grid is left alone.
    pub fn ai_solve(&self, session_id: &str) -> Result<AIAttempt> {
        let slot = self.slot(session_id)?;
        let (puzzle, test_index, config) = {
            let session = slot.state.lock();
            if !session.mode.allows_ai() {
                return Err(ServiceError::WrongMode {
                    operation: "ai_solve",
                    mode: session.mode,
                });
            }
            let mut config = session.config.clone();
            if session.mode != Mode::Assist {
                config.hint = None;
            }
            (self.puzzle(&session.puzzle_id)?, session.test_index, config)
        };
        let _flight = slot.begin_flight()?;

        let attempt = solve(&puzzle, test_index, &config, self.provider.as_ref())?;

        let mut session = slot.state.lock();
        let attempt_index = session.attempts.len();
        session.attempts.push(attempt.clone());
        self.log(
            &mut session,
            EventPayload::AiSolve {
                attempt_index,
                model: attempt.config.model.clone(),
                num_examples: attempt.config.num_examples,
                hint: attempt.config.hint.clone(),
                prompt_sha256: attempt.prompt_sha256.clone(),
                parsed: attempt.grid().is_some(),
                parse_failure: attempt.parsed.failure().map(|f| f.reason),
                latency_ms: attempt.raw.latency.as_millis() as u64,
            },
        );
        Ok(attempt)
    }

    /// Asks for an explanation, about the latest readable attempt when there is one.
    pub fn ai_explain(&self, session_id: &str) -> Result<String> {
        let slot = self.slot(session_id)?;
        let (puzzle, test_index, config, latest) = {
            let session = slot.state.lock();
            if !session.mode.allows_ai() {
                return Err(ServiceError::WrongMode {
                    operation: "ai_explain",
                    mode: session.mode,
                });
            }
            let mut config = session.config.clone();
            if session.mode != Mode::Assist {
                config.hint = None;
            }
            let latest = session
                .attempts
                .iter()
                .enumerate()
                .rev()
                .find(|(_, a)| a.grid().is_some())
                .map(|(i, a)| (i, a.clone()));
            (
                self.puzzle(&session.puzzle_id)?,
                session.test_index,
                config,
                latest,
            )
        };
        let _flight = slot.begin_flight()?;

        let text = explain(
            &puzzle,
            test_index,
            latest.as_ref().map(|(_, a)| a),
            &config,
            self.provider.as_ref(),
        )?;

        let mut session = slot.state.lock();
        let attempt_index = latest.map(|(i, _)| i);
        if let Some(i) = attempt_index {
            session.attempts[i].explanation = Some(text.clone());
        }
        self.log(
            &mut session,
            EventPayload::AiExplain {
                attempt_index,
                model: config.model.clone(),
                explanation: text.clone(),
            },
        );
        Ok(text)
    }

    /// Stores the Assist-mode hint verbatim; a blank hint clears it.
    pub fn set_hint(&self, session_id: &str, hint: &str) -> Result<Session> {
        let slot = self.slot(session_id)?;
        let mut session = slot.state.lock();
        if session.mode != Mode::Assist {
            return Err(ServiceError::WrongMode {
                operation: "set_hint",
                mode: session.mode,
            });
        }
        session.config.set_hint(hint);
        let hint = session.config.hint.clone();
        self.log(&mut session, EventPayload::HintSet { hint });
        Ok(session.clone())
    }

    pub fn set_config(&self, session_id: &str, update: ConfigUpdate) -> Result<Session> {
        let slot = self.slot(session_id)?;
        let mut session = slot.state.lock();
        if session.mode != Mode::Assist {
            return Err(ServiceError::WrongMode {
                operation: "set_config",
                mode: session.mode,
            });
        }
        if let Some(model) = &update.model {
            if self.settings.strict_models && !model.is_registered() {
                return Err(ServiceError::UnknownModel(model.to_string()));
            }
        }
        if let Some(n) = update.num_examples {
            check_examples(n, &self.puzzle(&session.puzzle_id)?)?;
        }
        if let Some(model) = update.model.clone() {
            session.config.model = model;
        }
        if let Some(n) = update.num_examples {
            session.config.num_examples = n;
        }
        let config = session.config.clone();
        self.log(
            &mut session,
            EventPayload::ConfigChanged {
                model: update.model,
                num_examples: update.num_examples,
                config,
            },
        );
        Ok(session.clone())
    }

    /// Generates a ruleless puzzle and appends it to the live set under a fresh id.
    pub fn add_random_puzzle(&self, request: &RandomPuzzleRequest) -> Result<Puzzle> {
        let slot = self.slot(&request.session_id)?;
        let mut session = slot.state.lock();
        if session.mode != Mode::Assist {
            return Err(ServiceError::WrongMode {
                operation: "add_random_puzzle",
                mode: session.mode,
            });
        }
        let mut puzzle =
            generate_random_puzzle(request.rows, request.cols, request.num_train, request.seed)?;
        {
            let mut puzzles = self.puzzles.write();
            loop {
                let n = self.random_counter.fetch_add(1, Ordering::SeqCst) + 1;
                let id = format!("random-{n}");
                if puzzles.get(&id).is_none() {
                    puzzle.id = id;
                    break;
                }
            }
            puzzles.push(puzzle.clone())?;
        }
        self.log(
            &mut session,
            EventPayload::RandomPuzzleAdded {
                puzzle_id: puzzle.id.clone(),
                rows: request.rows,
                cols: request.cols,
                num_train: request.num_train,
                seed: request.seed,
            },
        );
        Ok(puzzle)
    }

    pub fn puzzle_set(&self) -> PuzzleSet {
        self.puzzles.read().clone()
    }
}
