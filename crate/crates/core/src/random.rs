//! Random-pattern puzzles with no transformation rule behind them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{PuzzleError, Result};
use crate::grid::{Color, Grid, MAX_DIM};
use crate::puzzle::{ExamplePair, Level, Puzzle};

/// Level assigned to generated puzzles.
pub const RANDOM_PUZZLE_LEVEL: u8 = 4;

/// Generates `num_train` train pairs and one test pair of uniformly random
/// `rows`x`cols` grids. The same arguments always produce the same puzzle.
pub fn generate_random_puzzle(rows: usize, cols: usize, num_train: usize, seed: u64) -> Result<Puzzle> {
    if rows == 0 || cols == 0 || rows > MAX_DIM || cols > MAX_DIM {
        return Err(PuzzleError::DimsOutOfRange {
            location: "random puzzle".into(),
            rows,
            cols,
        });
    }
    if num_train == 0 {
        return Err(PuzzleError::ZeroTrain);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grid = || -> Result<Grid> {
        let cells = (0..rows * cols)
            .map(|_| Color::new(rng.random_range(0..Color::COUNT as u8)).expect("in range"))
            .collect();
        Grid::from_cells(rows, cols, cells)
    };
    let mut pair = || -> Result<ExamplePair> {
        Ok(ExamplePair {
            input: grid()?,
            output: grid()?,
        })
    };
    let train = (0..num_train).map(|_| pair()).collect::<Result<Vec<_>>>()?;
    let test = vec![pair()?];
    let id = format!("random-{rows}x{cols}-{num_train}-{seed}");
    let mut puzzle = Puzzle::new(id, Level::new(RANDOM_PUZZLE_LEVEL as i64)?, train, test)?;
    puzzle.ruleless = true;
    Ok(puzzle)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_shaped() {
        let a = generate_random_puzzle(5, 5, 3, 42).unwrap();
        let b = generate_random_puzzle(5, 5, 3, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.ruleless);
        assert_eq!(a.train.len(), 3);
        assert_eq!(a.test.len(), 1);
        for pair in a.train.iter().chain(&a.test) {
            assert_eq!(pair.input.dims(), (5, 5));
            assert_eq!(pair.output.dims(), (5, 5));
        }
        assert_ne!(a, generate_random_puzzle(5, 5, 3, 43).unwrap());
    }

    #[test]
    fn rejects_bad_params() {
        assert!(matches!(
            generate_random_puzzle(0, 5, 1, 0),
            Err(PuzzleError::DimsOutOfRange { .. })
        ));
        assert!(matches!(
            generate_random_puzzle(5, 31, 1, 0),
            Err(PuzzleError::DimsOutOfRange { .. })
        ));
        assert_eq!(generate_random_puzzle(5, 5, 0, 0), Err(PuzzleError::ZeroTrain));
    }
}
