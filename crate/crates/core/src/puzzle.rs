use serde::{Deserialize, Serialize};

use crate::error::{PuzzleError, Result};
use crate::grid::Grid;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExamplePair {
    pub input: Grid,
    pub output: Grid,
}

/// Difficulty level, 1 (easiest) through 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "u8")]
pub struct Level(u8);

impl Level {
    pub const MIN: u8 = 1;
    pub const MAX: u8 = 4;

    pub fn new(level: i64) -> Result<Level> {
        Level::try_from(level)
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

impl TryFrom<i64> for Level {
    type Error = PuzzleError;

    fn try_from(value: i64) -> Result<Level> {
        if (Level::MIN as i64..=Level::MAX as i64).contains(&value) {
            Ok(Level(value as u8))
        } else {
            Err(PuzzleError::LevelOutOfRange(value))
        }
    }
}

impl From<Level> for u8 {
    fn from(level: Level) -> u8 {
        level.0
    }
}

impl std::fmt::Display for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An ARC task plus the metadata the game needs around it.
///
/// `ruleless` puzzles are random patterns: their test outputs exist so the
/// UI has something to show, but they are not ground truth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Puzzle {
    pub id: String,
    pub level: Level,
    pub train: Vec<ExamplePair>,
    pub test: Vec<ExamplePair>,
    #[serde(default)]
    pub ruleless: bool,
}

impl Puzzle {
    pub fn new(
        id: impl Into<String>,
        level: Level,
        train: Vec<ExamplePair>,
        test: Vec<ExamplePair>,
    ) -> Result<Puzzle> {
        if train.is_empty() {
            return Err(PuzzleError::MissingSection("train"));
        }
        if test.is_empty() {
            return Err(PuzzleError::MissingSection("test"));
        }
        Ok(Puzzle {
            id: id.into(),
            level,
            train,
            test,
            ruleless: false,
        })
    }

    pub fn test_pair(&self, test_index: usize) -> Result<&ExamplePair> {
        self.test.get(test_index).ok_or(PuzzleError::IndexOutOfRange {
            index: test_index,
            len: self.test.len(),
        })
    }

    pub fn summary(&self) -> PuzzleSummary {
        let first = &self.test[0].input;
        PuzzleSummary {
            id: self.id.clone(),
            level: self.level,
            train_count: self.train.len(),
            test_count: self.test.len(),
            test_rows: first.rows(),
            test_cols: first.cols(),
            ruleless: self.ruleless,
        }
    }
}

/// Listing entry used for puzzle navigation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PuzzleSummary {
    pub id: String,
    pub level: Level,
    pub train_count: usize,
    pub test_count: usize,
    pub test_rows: usize,
    pub test_cols: usize,
    pub ruleless: bool,
}

/// Ordered puzzle collection. Order is navigation order; ids are unique.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PuzzleSet {
    pub version: String,
    puzzles: Vec<Puzzle>,
}

impl PuzzleSet {
    pub fn new(version: impl Into<String>, puzzles: Vec<Puzzle>) -> Result<PuzzleSet> {
        let mut set = PuzzleSet {
            version: version.into(),
            puzzles: Vec::with_capacity(puzzles.len()),
        };
        for p in puzzles {
            set.push(p)?;
        }
        Ok(set)
    }

    /// Appends a puzzle, rejecting duplicate ids.
    pub fn push(&mut self, puzzle: Puzzle) -> Result<()> {
        if self.get(&puzzle.id).is_some() {
            return Err(PuzzleError::DuplicateId(puzzle.id));
        }
        self.puzzles.push(puzzle);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&Puzzle> {
        self.puzzles.iter().find(|p| p.id == id)
    }

    pub fn puzzles(&self) -> &[Puzzle] {
        &self.puzzles
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Puzzle> {
        self.puzzles.iter()
    }

    pub fn len(&self) -> usize {
        self.puzzles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.puzzles.is_empty()
    }

    pub fn summaries(&self) -> Vec<PuzzleSummary> {
        self.puzzles.iter().map(Puzzle::summary).collect()
    }
}

impl<'a> IntoIterator for &'a PuzzleSet {
    type Item = &'a Puzzle;
    type IntoIter = std::slice::Iter<'a, Puzzle>;

    fn into_iter(self) -> Self::IntoIter {
        self.puzzles.iter()
    }
}
