use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::Grid;
use crate::puzzle::Puzzle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VerdictStatus {
    Correct,
    Incorrect,
    /// The puzzle is a random pattern; there is nothing to check against.
    NoGroundTruth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    /// Differing cells when dimensions match; the expected cell count otherwise.
    pub mismatch_count: usize,
    pub dims_match: bool,
}

impl Verdict {
    pub fn is_correct(&self) -> bool {
        self.status == VerdictStatus::Correct
    }
}

/// Exact-match comparison of two grids.
pub fn compare_grids(candidate: &Grid, expected: &Grid) -> Verdict {
    if candidate.dims() != expected.dims() {
        return Verdict {
            status: VerdictStatus::Incorrect,
            mismatch_count: expected.len(),
            dims_match: false,
        };
    }
    let mismatch_count = candidate
        .cells()
        .iter()
        .zip(expected.cells())
        .filter(|(a, b)| a != b)
        .count();
    Verdict {
        status: if mismatch_count == 0 {
            VerdictStatus::Correct
        } else {
            VerdictStatus::Incorrect
        },
        mismatch_count,
        dims_match: true,
    }
}

/// Checks a candidate against test pair `test_index` of `puzzle`.
pub fn check_solution(candidate: &Grid, puzzle: &Puzzle, test_index: usize) -> Result<Verdict> {
    let pair = puzzle.test_pair(test_index)?;
    if puzzle.ruleless {
        return Ok(Verdict {
            status: VerdictStatus::NoGroundTruth,
            mismatch_count: 0,
            dims_match: candidate.dims() == pair.output.dims(),
        });
    }
    Ok(compare_grids(candidate, &pair.output))
}
