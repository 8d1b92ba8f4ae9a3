use chrono::{DateTime, Utc};
use puzzlers_core::Grid;
use puzzlers_llm::{AIAttempt, SolveConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    Manual,
    #[serde(rename = "AI")]
    Ai,
    Assist,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Manual, Mode::Ai, Mode::Assist];

    pub fn allows_ai(self) -> bool {
        matches!(self, Mode::Ai | Mode::Assist)
    }
}

/// Which grid a check looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckSource {
    Human,
    LastAiAttempt,
}

/// A player's live state. `after` is the player's own grid; AI answers
/// live in `attempts` and never overwrite it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub mode: Mode,
    pub puzzle_id: String,
    pub test_index: usize,
    pub after: Grid,
    pub attempts: Vec<AIAttempt>,
    pub config: SolveConfig,
    pub created: DateTime<Utc>,
    pub updated: DateTime<Utc>,
}
