use std::fmt;

use anyhow::{bail, Result};
use puzzlers_core::{Puzzle, PuzzleSet};
use puzzlers_llm::ModelId;

/// A sweep over puzzles × models × example counts, repeated `attempts` times.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchPlan {
    /// Empty means every puzzle in the set.
    pub puzzle_ids: Vec<String>,
    pub models: Vec<ModelId>,
    pub example_counts: Vec<usize>,
    pub attempts: usize,
    /// Added to the attempt index to pick mock replies.
    pub seed: u64,
}

/// One unit of work.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell<'a> {
    pub puzzle: &'a Puzzle,
    pub model: ModelId,
    pub num_examples: usize,
    pub attempt: usize,
}

impl BenchPlan {
    pub fn check(&self) -> Result<()> {
        if self.models.is_empty() {
            bail!("no models given");
        }
        if self.example_counts.is_empty() {
            bail!("no example counts given");
        }
        if self.example_counts.contains(&0) {
            bail!("example counts must be at least 1");
        }
        if self.attempts == 0 {
            bail!("attempts must be at least 1");
        }
        Ok(())
    }

    pub fn puzzles<'a>(&self, set: &'a PuzzleSet) -> Result<Vec<&'a Puzzle>> {
        if self.puzzle_ids.is_empty() {
            return Ok(set.iter().collect());
        }
        self.puzzle_ids
            .iter()
            .map(|id| match set.get(id) {
                Some(p) => Ok(p),
                None => bail!("unknown puzzle {id:?}"),
            })
            .collect()
    }

    pub fn size(&self, set: &PuzzleSet) -> Result<usize> {
        Ok(self.puzzles(set)?.len() * self.models.len() * self.example_counts.len() * self.attempts)
    }

    pub fn cells<'a>(&self, set: &'a PuzzleSet) -> Result<Vec<Cell<'a>>> {
        self.check()?;
        let mut cells = Vec::new();
        for puzzle in self.puzzles(set)? {
            for model in &self.models {
                for &num_examples in &self.example_counts {
                    for attempt in 0..self.attempts {
                        cells.push(Cell {
                            puzzle,
                            model: model.clone(),
                            num_examples,
                            attempt,
                        });
                    }
                }
            }
        }
        Ok(cells)
    }

    pub fn describe<'a>(&'a self, set: &'a PuzzleSet) -> PlanSummary<'a> {
        PlanSummary { plan: self, set }
    }
}

pub struct PlanSummary<'a> {
    plan: &'a BenchPlan,
    set: &'a PuzzleSet,
}

impl fmt::Display for PlanSummary<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.plan;
        let puzzles = p.puzzles(self.set).map(|v| v.len()).unwrap_or(0);
        write!(
            f,
            "plan: {puzzles} puzzles x {} models x {} example counts x {} attempts = {} cells",
            p.models.len(),
            p.example_counts.len(),
            p.attempts,
            puzzles * p.models.len() * p.example_counts.len() * p.attempts
        )
    }
}
