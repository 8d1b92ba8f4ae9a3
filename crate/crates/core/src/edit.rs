//! Manual-mode editing tools. Every tool takes a grid by reference and
//! returns a new grid; inputs are never modified.

use serde::{Deserialize, Serialize};

use crate::error::{PuzzleError, Result};
use crate::grid::{Color, Grid, MAX_DIM};

/// Inclusive rectangle of cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Selection {
    pub top: usize,
    pub left: usize,
    pub bottom: usize,
    pub right: usize,
}

impl Selection {
    pub fn new(top: usize, left: usize, bottom: usize, right: usize) -> Result<Selection> {
        let sel = Selection {
            top,
            left,
            bottom,
            right,
        };
        sel.check_ordered()?;
        Ok(sel)
    }

    pub fn cell(row: usize, col: usize) -> Selection {
        Selection {
            top: row,
            left: col,
            bottom: row,
            right: col,
        }
    }

    pub fn whole(grid: &Grid) -> Selection {
        Selection {
            top: 0,
            left: 0,
            bottom: grid.rows() - 1,
            right: grid.cols() - 1,
        }
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        (self.top..=self.bottom).contains(&row) && (self.left..=self.right).contains(&col)
    }

    pub fn area(&self) -> usize {
        (self.bottom - self.top + 1) * (self.right - self.left + 1)
    }

    fn check_ordered(&self) -> Result<()> {
        if self.top > self.bottom || self.left > self.right {
            return Err(PuzzleError::InvalidSelection(format!(
                "({}, {})-({}, {}) is inverted",
                self.top, self.left, self.bottom, self.right
            )));
        }
        Ok(())
    }

    fn check_in(&self, grid: &Grid) -> Result<()> {
        self.check_ordered()?;
        grid.bounds_check(self.top, self.left)?;
        grid.bounds_check(self.bottom, self.right)
    }
}

pub fn set_cell(grid: &Grid, row: usize, col: usize, color: Color) -> Result<Grid> {
    grid.bounds_check(row, col)?;
    let mut out = grid.clone();
    let idx = out.index(row, col);
    out.cells_mut()[idx] = color;
    Ok(out)
}

pub fn batch_set(grid: &Grid, sel: Selection, color: Color) -> Result<Grid> {
    sel.check_in(grid)?;
    let mut out = grid.clone();
    for row in sel.top..=sel.bottom {
        let start = out.index(row, sel.left);
        let end = out.index(row, sel.right);
        out.cells_mut()[start..=end].fill(color);
    }
    Ok(out)
}

/// Paint-bucket fill over the 4-connected region sharing the seed's color.
pub fn flood_fill(grid: &Grid, row: usize, col: usize, color: Color) -> Result<Grid> {
    grid.bounds_check(row, col)?;
    let target = grid.get(row, col).expect("bounds checked");
    if target == color {
        return Ok(grid.clone());
    }
    let (rows, cols) = grid.dims();
    let mut out = grid.clone();
    let mut stack = vec![(row, col)];
    let seed = out.index(row, col);
    out.cells_mut()[seed] = color;
    // Cells are recolored when pushed, so each is visited at most once.
    while let Some((r, c)) = stack.pop() {
        let mut visit = |nr: usize, nc: usize, out: &mut Grid| {
            let idx = out.index(nr, nc);
            if out.cells()[idx] == target {
                out.cells_mut()[idx] = color;
                stack.push((nr, nc));
            }
        };
        if r > 0 {
            visit(r - 1, c, &mut out);
        }
        if r + 1 < rows {
            visit(r + 1, c, &mut out);
        }
        if c > 0 {
            visit(r, c - 1, &mut out);
        }
        if c + 1 < cols {
            visit(r, c + 1, &mut out);
        }
    }
    Ok(out)
}

/// Copies the Before grid so it can be edited as the After grid.
pub fn clone_grid(before: &Grid) -> Grid {
    before.clone()
}

/// Changes dimensions, keeping the overlapping top-left region and filling
/// new cells with the background color.
pub fn resize_grid(grid: &Grid, rows: usize, cols: usize) -> Result<Grid> {
    if rows == 0 || cols == 0 || rows > MAX_DIM || cols > MAX_DIM {
        return Err(PuzzleError::DimsOutOfRange {
            location: "resize".into(),
            rows,
            cols,
        });
    }
    let mut out = Grid::blank(rows, cols)?;
    let keep_cols = cols.min(grid.cols());
    for r in 0..rows.min(grid.rows()) {
        let start = out.index(r, 0);
        out.cells_mut()[start..start + keep_cols].copy_from_slice(&grid.row(r)[..keep_cols]);
    }
    Ok(out)
}

/// All-background grid with the same dimensions.
pub fn reset_grid(grid: &Grid) -> Grid {
    Grid::blank(grid.rows(), grid.cols()).expect("dims already valid")
}

/// One application of a Manual-mode tool.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tool", rename_all = "snake_case")]
pub enum EditAction {
    SetCell { row: usize, col: usize, color: Color },
    BatchSet { selection: Selection, color: Color },
    FloodFill { row: usize, col: usize, color: Color },
    Clone,
    Resize { rows: usize, cols: usize },
    Reset,
}

impl EditAction {
    /// Applies the tool to `after`. `before` is the read-only test input
    /// that `Clone` copies from.
    pub fn apply(&self, after: &Grid, before: &Grid) -> Result<Grid> {
        match *self {
            EditAction::SetCell { row, col, color } => set_cell(after, row, col, color),
            EditAction::BatchSet { selection, color } => batch_set(after, selection, color),
            EditAction::FloodFill { row, col, color } => flood_fill(after, row, col, color),
            EditAction::Clone => Ok(clone_grid(before)),
            EditAction::Resize { rows, cols } => resize_grid(after, rows, cols),
            EditAction::Reset => Ok(reset_grid(after)),
        }
    }
}
