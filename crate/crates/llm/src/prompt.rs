//! Solve and explain prompts.
//!
//! The wording is fixed and versioned by [`PROMPT_TEMPLATE_VERSION`]. What
//! callers may rely on is the structure: one `Before:`/`After:` pair per
//! example shown, a single `Test input:` line, an optional
//! `Hint from the player:` line, and for explanations an optional
//! `Proposed answer:` line.

use std::fmt::Write as _;
use std::time::Duration;

use puzzlers_core::{Grid, Puzzle};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::provider::{default_model, duration_ms, ModelId};
use crate::text::serialize_grid;

pub const PROMPT_TEMPLATE_VERSION: &str = "1";

pub const BEFORE_LABEL: &str = "Before:";
pub const AFTER_LABEL: &str = "After:";
pub const TEST_INPUT_LABEL: &str = "Test input:";
pub const HINT_LABEL: &str = "Hint from the player:";
pub const PROPOSED_ANSWER_LABEL: &str = "Proposed answer:";

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

const SOLVE_SYSTEM: &str = "You are solving a visual grid puzzle. Each grid is written as a list \
of rows, and each number from 0 to 9 stands for a color (0 is the background). Every example \
shows a Before grid and the After grid it turns into. Find the rule that changes Before into \
After, then apply the same rule to the test input. Reply with only the answer grid, written as \
a nested list of rows.";

const EXPLAIN_SYSTEM: &str = "You explain grid puzzles to a young child, about 8 years old. Each \
grid is written as a list of rows, and each number from 0 to 9 stands for a color (0 is the \
background). Use short, simple sentences. Explain your reasoning step by step as a numbered list \
(1., 2., 3., ...), with one short sentence per step.";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PromptError {
    #[error("asked for {requested} examples but the puzzle only has {available}")]
    TooFewExamples { requested: usize, available: usize },
    #[error("at least one example must be shown")]
    NoExamples,
    #[error("test index {index} out of range ({len} test pairs)")]
    IndexOutOfRange { index: usize, len: usize },
}

impl PromptError {
    pub fn code(&self) -> &'static str {
        match self {
            PromptError::TooFewExamples { .. } => "too_few_examples",
            PromptError::NoExamples => "no_examples",
            PromptError::IndexOutOfRange { .. } => "index_out_of_range",
        }
    }
}

/// Per-request model settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub model: ModelId,
    pub num_examples: usize,
    pub hint: Option<String>,
    /// Unset means the provider default.
    pub sampling_temperature: Option<f64>,
    #[serde(with = "duration_ms", rename = "timeout_ms")]
    pub timeout: Duration,
    /// Selects the scripted reply of a mock provider; ignored by live providers.
    pub request_seed: Option<u64>,
}

impl SolveConfig {
    pub fn new(model: ModelId, num_examples: usize) -> SolveConfig {
        SolveConfig {
            model,
            num_examples,
            hint: None,
            sampling_temperature: None,
            timeout: DEFAULT_TIMEOUT,
            request_seed: None,
        }
    }

    /// Default model, every train example, no hint.
    pub fn for_puzzle(puzzle: &Puzzle) -> SolveConfig {
        SolveConfig::new(default_model(), puzzle.train.len())
    }

    /// Stores `hint` verbatim; a blank hint clears it.
    pub fn set_hint(&mut self, hint: &str) {
        self.hint = (!hint.trim().is_empty()).then(|| hint.to_string());
    }

    pub fn with_hint(mut self, hint: &str) -> Self {
        self.set_hint(hint);
        self
    }

    pub fn check_examples(&self, puzzle: &Puzzle) -> Result<(), PromptError> {
        check_examples(self.num_examples, puzzle)
    }
}

pub fn check_examples(num_examples: usize, puzzle: &Puzzle) -> Result<(), PromptError> {
    if num_examples == 0 {
        return Err(PromptError::NoExamples);
    }
    if num_examples > puzzle.train.len() {
        return Err(PromptError::TooFewExamples {
            requested: num_examples,
            available: puzzle.train.len(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prompt {
    pub system_text: String,
    pub user_text: String,
}

impl Prompt {
    /// SHA-256 of the prompt text, hex encoded. Used in logs instead of the text.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        hasher.update(self.system_text.as_bytes());
        hasher.update([0u8]);
        hasher.update(self.user_text.as_bytes());
        hex::encode(hasher.finalize())
    }
}

fn test_input(puzzle: &Puzzle, test_index: usize) -> Result<&Grid, PromptError> {
    puzzle
        .test
        .get(test_index)
        .map(|pair| &pair.input)
        .ok_or(PromptError::IndexOutOfRange {
            index: test_index,
            len: puzzle.test.len(),
        })
}

fn write_examples(out: &mut String, puzzle: &Puzzle, config: &SolveConfig) {
    for (i, pair) in puzzle.train.iter().take(config.num_examples).enumerate() {
        let _ = writeln!(out, "Example {}", i + 1);
        let _ = writeln!(out, "{BEFORE_LABEL} {}", serialize_grid(&pair.input));
        let _ = writeln!(out, "{AFTER_LABEL} {}", serialize_grid(&pair.output));
        out.push('\n');
    }
}

fn write_hint(out: &mut String, config: &SolveConfig) {
    if let Some(hint) = &config.hint {
        let _ = writeln!(out, "{HINT_LABEL} {hint}");
        out.push('\n');
    }
}

pub fn build_solve_prompt(
    puzzle: &Puzzle,
    test_index: usize,
    config: &SolveConfig,
) -> Result<Prompt, PromptError> {
    config.check_examples(puzzle)?;
    let input = test_input(puzzle, test_index)?;

    let mut user = String::new();
    write_examples(&mut user, puzzle, config);
    let _ = writeln!(user, "{TEST_INPUT_LABEL} {}", serialize_grid(input));
    user.push('\n');
    write_hint(&mut user, config);
    user.push_str("What is the After grid for the test input? Reply with the grid only.");

    Ok(Prompt {
        system_text: SOLVE_SYSTEM.to_string(),
        user_text: user,
    })
}

/// Builds an explanation request. When `answer` is given, the explanation
/// is asked to cover that specific grid.
pub fn build_explain_prompt(
    puzzle: &Puzzle,
    test_index: usize,
    answer: Option<&Grid>,
    config: &SolveConfig,
) -> Result<Prompt, PromptError> {
    config.check_examples(puzzle)?;
    let input = test_input(puzzle, test_index)?;

    let mut user = String::new();
    write_examples(&mut user, puzzle, config);
    let _ = writeln!(user, "{TEST_INPUT_LABEL} {}", serialize_grid(input));
    if let Some(answer) = answer {
        let _ = writeln!(user, "{PROPOSED_ANSWER_LABEL} {}", serialize_grid(answer));
    }
    user.push('\n');
    write_hint(&mut user, config);
    if answer.is_some() {
        user.push_str(
            "Explain step by step how the proposed answer was made from the test input. \
             Write it as a numbered list of short sentences.",
        );
    } else {
        user.push_str(
            "Explain step by step how to turn the test input into its After grid. \
             Write it as a numbered list of short sentences.",
        );
    }

    Ok(Prompt {
        system_text: EXPLAIN_SYSTEM.to_string(),
        user_text: user,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use puzzlers_core::{ExamplePair, Level};

    fn puzzle(train: usize) -> Puzzle {
        let pair = |n: i64| ExamplePair {
            input: Grid::from_rows(&[vec![n % 10]]).unwrap(),
            output: Grid::from_rows(&[vec![(n + 1) % 10]]).unwrap(),
        };
        Puzzle::new(
            "p",
            Level::new(1).unwrap(),
            (0..train as i64).map(pair).collect(),
            vec![ExamplePair {
                input: Grid::from_rows(&[vec![0, 2, 2], vec![0, 1, 1], vec![0, 0, 3]]).unwrap(),
                output: Grid::from_rows(&[vec![1]]).unwrap(),
            }],
        )
        .unwrap()
    }

    #[test]
    fn solve_prompt_counts() {
        let p = puzzle(3);
        let config = SolveConfig::new(default_model(), 1);
        let prompt = build_solve_prompt(&p, 0, &config).unwrap();
        assert_eq!(prompt.user_text.matches(BEFORE_LABEL).count(), 1);
        assert_eq!(prompt.user_text.matches(TEST_INPUT_LABEL).count(), 1);
        assert!(prompt
            .user_text
            .contains("Test input: [[0, 2, 2], [0, 1, 1], [0, 0, 3]]"));
        assert!(!prompt.user_text.contains(HINT_LABEL));
    }

    #[test]
    fn solve_prompt_hint_once() {
        let p = puzzle(3);
        let config =
            SolveConfig::new(default_model(), 3).with_hint("make a donut shape around the color");
        let prompt = build_solve_prompt(&p, 0, &config).unwrap();
        assert_eq!(
            prompt
                .user_text
                .matches("make a donut shape around the color")
                .count(),
            1
        );
        assert_eq!(prompt.user_text.matches(HINT_LABEL).count(), 1);
    }

    #[test]
    fn solve_prompt_errors() {
        let p = puzzle(3);
        assert_eq!(
            build_solve_prompt(&p, 0, &SolveConfig::new(default_model(), 5)),
            Err(PromptError::TooFewExamples {
                requested: 5,
                available: 3
            })
        );
        assert_eq!(
            build_solve_prompt(&p, 0, &SolveConfig::new(default_model(), 0)),
            Err(PromptError::NoExamples)
        );
        assert_eq!(
            build_solve_prompt(&p, 1, &SolveConfig::new(default_model(), 1)),
            Err(PromptError::IndexOutOfRange { index: 1, len: 1 })
        );
    }

    #[test]
    fn explain_prompt_template() {
        let p = puzzle(2);
        let config = SolveConfig::for_puzzle(&p);
        let plain = build_explain_prompt(&p, 0, None, &config).unwrap();
        let text = format!("{}\n{}", plain.system_text, plain.user_text);
        assert!(text.contains("step"));
        assert!(text.contains("numbered list"));
        assert!(text.contains("child"));
        assert_eq!(plain.user_text.matches(PROPOSED_ANSWER_LABEL).count(), 0);
        assert_eq!(plain.user_text.matches(BEFORE_LABEL).count(), 2);

        let answer = Grid::from_rows(&[vec![4, 4], vec![5, 5]]).unwrap();
        let with = build_explain_prompt(&p, 0, Some(&answer), &config).unwrap();
        assert!(with.user_text.contains("Proposed answer: [[4, 4], [5, 5]]"));
    }

    #[test]
    fn hint_clearing() {
        let mut config = SolveConfig::new(default_model(), 1);
        config.set_hint("  look at the corners ");
        assert_eq!(config.hint.as_deref(), Some("  look at the corners "));
        config.set_hint("   ");
        assert_eq!(config.hint, None);
    }

    #[test]
    fn digest_is_stable() {
        let p = puzzle(1);
        let config = SolveConfig::for_puzzle(&p);
        let a = build_solve_prompt(&p, 0, &config).unwrap();
        let b = build_solve_prompt(&p, 0, &config).unwrap();
        assert_eq!(a.digest(), b.digest());
        assert_eq!(a.digest().len(), 64);
    }
}
