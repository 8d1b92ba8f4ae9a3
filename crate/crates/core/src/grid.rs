//! Rectangular color grids, the currency of every puzzle.
//!
//! A [`Grid`] is always between 1x1 and 30x30 and every cell holds a
//! [`Color`] in `0..=9`. Grids serialize to (and deserialize from) the
//! nested row lists used by ARC task files.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{PuzzleError, Result};

/// Largest row or column count a grid may have.
pub const MAX_DIM: usize = 30;

/// One of the ten palette colors. Index 0 is the background.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Color(u8);

impl Color {
    pub const BACKGROUND: Color = Color(0);
    pub const COUNT: usize = 10;

    pub fn new(index: u8) -> Option<Color> {
        (index <= 9).then_some(Color(index))
    }

    pub fn index(self) -> u8 {
        self.0
    }

    /// All ten colors in index order.
    pub fn all() -> impl Iterator<Item = Color> {
        (0..Self::COUNT as u8).map(Color)
    }
}

impl TryFrom<i64> for Color {
    type Error = i64;

    fn try_from(value: i64) -> std::result::Result<Self, i64> {
        u8::try_from(value)
            .ok()
            .and_then(Color::new)
            .ok_or(value)
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Color {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.0)
    }
}

impl<'de> Deserialize<'de> for Color {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = i64::deserialize(deserializer)?;
        Color::try_from(raw)
            .map_err(|v| serde::de::Error::custom(format!("color {v} out of range 0..=9")))
    }
}

/// Immutable row-major grid of colors.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Grid {
    rows: usize,
    cols: usize,
    cells: Vec<Color>,
}

fn check_dims(rows: usize, cols: usize, location: &str) -> Result<()> {
    if rows == 0 || cols == 0 || rows > MAX_DIM || cols > MAX_DIM {
        return Err(PuzzleError::DimsOutOfRange {
            location: location.to_string(),
            rows,
            cols,
        });
    }
    Ok(())
}

impl Grid {
    /// A grid of the given size filled with `fill`.
    pub fn filled(rows: usize, cols: usize, fill: Color) -> Result<Grid> {
        check_dims(rows, cols, "grid")?;
        Ok(Grid {
            rows,
            cols,
            cells: vec![fill; rows * cols],
        })
    }

    /// An all-background grid.
    pub fn blank(rows: usize, cols: usize) -> Result<Grid> {
        Grid::filled(rows, cols, Color::BACKGROUND)
    }

    pub fn from_cells(rows: usize, cols: usize, cells: Vec<Color>) -> Result<Grid> {
        check_dims(rows, cols, "grid")?;
        if cells.len() != rows * cols {
            return Err(PuzzleError::RaggedGrid {
                location: "grid".into(),
                row: cells.len() / cols.max(1),
                expected: rows * cols,
                found: cells.len(),
            });
        }
        Ok(Grid { rows, cols, cells })
    }

    /// Builds a grid from nested rows of raw integers, validating shape and colors.
    /// `location` names the grid in error messages (e.g. `train[1].output`).
    pub fn from_rows_at<R: AsRef<[i64]>>(rows: &[R], location: &str) -> Result<Grid> {
        let nrows = rows.len();
        let ncols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        for (i, row) in rows.iter().enumerate() {
            let len = row.as_ref().len();
            if len != ncols {
                return Err(PuzzleError::RaggedGrid {
                    location: location.to_string(),
                    row: i,
                    expected: ncols,
                    found: len,
                });
            }
        }
        check_dims(nrows, ncols, location)?;
        let mut cells = Vec::with_capacity(nrows * ncols);
        for row in rows {
            for &v in row.as_ref() {
                let color = Color::try_from(v).map_err(|value| PuzzleError::ColorOutOfRange {
                    location: location.to_string(),
                    value,
                })?;
                cells.push(color);
            }
        }
        Ok(Grid {
            rows: nrows,
            cols: ncols,
            cells,
        })
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Grid> {
        Grid::from_rows_at(rows, "grid")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        row < self.rows && col < self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Option<Color> {
        self.contains(row, col)
            .then(|| self.cells[row * self.cols + col])
    }

    pub fn cells(&self) -> &[Color] {
        &self.cells
    }

    pub fn row(&self, row: usize) -> &[Color] {
        &self.cells[row * self.cols..(row + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[Color]> {
        self.cells.chunks(self.cols)
    }

    /// Nested `u8` rows, the shape written to task documents.
    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        self.iter_rows()
            .map(|r| r.iter().map(|c| c.index()).collect())
            .collect()
    }

    pub(crate) fn bounds_check(&self, row: usize, col: usize) -> Result<()> {
        if self.contains(row, col) {
            Ok(())
        } else {
            Err(PuzzleError::OutOfBounds {
                row,
                col,
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub(crate) fn index(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    pub(crate) fn cells_mut(&mut self) -> &mut [Color] {
        &mut self.cells
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Grid{}x{}{:?}", self.rows, self.cols, self.to_rows())
    }
}

impl Serialize for Grid {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Grid {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<i64>>::deserialize(deserializer)?;
        Grid::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn color_bounds() {
        assert!(Color::new(9).is_some());
        assert!(Color::new(10).is_none());
        assert_eq!(Color::try_from(-1), Err(-1));
        assert_eq!(Color::try_from(10), Err(10));
        assert_eq!(Color::all().count(), 10);
    }

    #[test]
    fn rows_roundtrip() {
        let g = Grid::from_rows(&[vec![0, 2, 2], vec![0, 1, 1], vec![0, 0, 3]]).unwrap();
        assert_eq!(g.dims(), (3, 3));
        assert_eq!(g.get(2, 2), Color::new(3));
        assert_eq!(g.to_rows(), vec![vec![0, 2, 2], vec![0, 1, 1], vec![0, 0, 3]]);
    }

    #[test]
    fn rejects_bad_shapes() {
        let ragged = Grid::from_rows(&[vec![1, 2], vec![3]]).unwrap_err();
        assert!(matches!(ragged, PuzzleError::RaggedGrid { row: 1, .. }));

        let empty: Vec<Vec<i64>> = vec![];
        assert!(matches!(
            Grid::from_rows(&empty),
            Err(PuzzleError::DimsOutOfRange { .. })
        ));
        assert!(matches!(
            Grid::from_rows(&[Vec::<i64>::new()]),
            Err(PuzzleError::DimsOutOfRange { .. })
        ));
        assert!(matches!(
            Grid::blank(31, 1),
            Err(PuzzleError::DimsOutOfRange { .. })
        ));
        assert!(matches!(
            Grid::from_rows(&[vec![1, 10]]),
            Err(PuzzleError::ColorOutOfRange { value: 10, .. })
        ));
    }

    #[test]
    fn serde_as_nested_lists() {
        let g: Grid = serde_json::from_str("[[1,2],[3,4]]").unwrap();
        assert_eq!(serde_json::to_string(&g).unwrap(), "[[1,2],[3,4]]");
        assert!(serde_json::from_str::<Grid>("[[1,2],[3]]").is_err());
    }
}
