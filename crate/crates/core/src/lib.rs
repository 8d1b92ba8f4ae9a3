//! Puzzle engine: grids, ARC task files, Manual-mode editing tools,
//! exact-match checking and random-pattern generation.

pub mod codec;
pub mod edit;
pub mod error;
pub mod grid;
pub mod puzzle;
pub mod random;
pub mod verdict;

pub use codec::{
    bundled_manifest_path, bundled_puzzle_set, load_puzzle_set, load_puzzle_set_from_path,
    parse_puzzle, serialize_puzzle, Manifest, ManifestEntry,
};
pub use edit::{
    batch_set, clone_grid, flood_fill, reset_grid, resize_grid, set_cell, EditAction, Selection,
};
pub use error::PuzzleError;
pub use grid::{Color, Grid, MAX_DIM};
pub use puzzle::{ExamplePair, Level, Puzzle, PuzzleSet, PuzzleSummary};
pub use random::generate_random_puzzle;
pub use verdict::{check_solution, compare_grids, Verdict, VerdictStatus};

/// How a fresh After grid is sized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AfterGridDefault {
    /// All-background grid with the test input's dimensions.
    #[default]
    MatchTestInput,
    /// All-background grid of a fixed size.
    Fixed { rows: usize, cols: usize },
}

impl AfterGridDefault {
    pub fn initial_after(&self, puzzle: &Puzzle, test_index: usize) -> Result<Grid, PuzzleError> {
        match *self {
            AfterGridDefault::MatchTestInput => {
                let input = &puzzle.test_pair(test_index)?.input;
                Grid::blank(input.rows(), input.cols())
            }
            AfterGridDefault::Fixed { rows, cols } => Grid::blank(rows, cols),
        }
    }
}
