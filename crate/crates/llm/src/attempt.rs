use chrono::{DateTime, Utc};
use puzzlers_core::{Grid, Puzzle, Verdict};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::prompt::{build_explain_prompt, build_solve_prompt, PromptError, SolveConfig};
use crate::provider::{complete, Provider, ProviderError, RawResponse};
use crate::text::{parse_grid_response, ParseFailure};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BridgeError {
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Provider(#[from] ProviderError),
}

impl BridgeError {
    pub fn code(&self) -> &'static str {
        match self {
            BridgeError::Prompt(e) => e.code(),
            BridgeError::Provider(e) => e.code(),
        }
    }
}

/// Result of reading a grid out of a model reply.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum ParseOutcome {
    Parsed { grid: Grid },
    Failed { failure: ParseFailure },
}

impl ParseOutcome {
    pub fn grid(&self) -> Option<&Grid> {
        match self {
            ParseOutcome::Parsed { grid } => Some(grid),
            ParseOutcome::Failed { .. } => None,
        }
    }

    pub fn failure(&self) -> Option<&ParseFailure> {
        match self {
            ParseOutcome::Parsed { .. } => None,
            ParseOutcome::Failed { failure } => Some(failure),
        }
    }
}

impl From<Result<Grid, ParseFailure>> for ParseOutcome {
    fn from(r: Result<Grid, ParseFailure>) -> Self {
        match r {
            Ok(grid) => ParseOutcome::Parsed { grid },
            Err(failure) => ParseOutcome::Failed { failure },
        }
    }
}

/// One "Ask AI to Solve" round trip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AIAttempt {
    pub config: SolveConfig,
    pub prompt_sha256: String,
    pub raw: RawResponse,
    pub parsed: ParseOutcome,
    pub verdict: Option<Verdict>,
    pub explanation: Option<String>,
    pub timestamp: DateTime<Utc>,
}

impl AIAttempt {
    pub fn grid(&self) -> Option<&Grid> {
        self.parsed.grid()
    }
}

/// Builds the solve prompt, asks the provider and parses the reply. An
/// unreadable reply is a normal outcome recorded on the attempt.
pub fn solve(
    puzzle: &Puzzle,
    test_index: usize,
    config: &SolveConfig,
    provider: &dyn Provider,
) -> Result<AIAttempt, BridgeError> {
    let prompt = build_solve_prompt(puzzle, test_index, config)?;
    let raw = complete(&prompt, config, provider)?;
    let parsed = parse_grid_response(&raw.text).into();
    Ok(AIAttempt {
        config: config.clone(),
        prompt_sha256: prompt.digest(),
        raw,
        parsed,
        verdict: None,
        explanation: None,
        timestamp: Utc::now(),
    })
}

/// Asks for a child-friendly explanation and returns the reply verbatim.
pub fn explain(
    puzzle: &Puzzle,
    test_index: usize,
    attempt: Option<&AIAttempt>,
    config: &SolveConfig,
    provider: &dyn Provider,
) -> Result<String, BridgeError> {
    let answer = attempt.and_then(AIAttempt::grid);
    let prompt = build_explain_prompt(puzzle, test_index, answer, config)?;
    Ok(complete(&prompt, config, provider)?.text)
}
