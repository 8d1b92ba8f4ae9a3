use std::fmt::Write;

use puzzlers_core::{check_solution, Grid, Puzzle};
use puzzlers_llm::ParseOutcome;

const GAP: &str = "    ";

/// Digits separated by single spaces, one line per row.
pub fn render_grid(grid: &Grid) -> Vec<String> {
    grid.iter_rows()
        .map(|row| {
            row.iter()
                .map(|c| c.index().to_string())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect()
}

/// `x` where the attempt differs from the expected grid, `.` where it
/// agrees. With different dimensions every expected cell is marked.
pub fn diff_marks(expected: &Grid, attempt: &Grid) -> Vec<String> {
    let same_dims = expected.dims() == attempt.dims();
    (0..expected.rows())
        .map(|r| {
            (0..expected.cols())
                .map(|c| {
                    if same_dims && expected.get(r, c) == attempt.get(r, c) {
                        "."
                    } else {
                        "x"
                    }
                })
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect()
}

pub fn count_marks(marks: &[String]) -> usize {
    marks.iter().map(|l| l.matches('x').count()).sum()
}

/// Lays titled panels out side by side, top-aligned.
pub fn side_by_side(panels: &[(&str, Vec<String>)]) -> String {
    let widths: Vec<usize> = panels
        .iter()
        .map(|(title, lines)| lines.iter().map(String::len).chain([title.len()]).max().unwrap_or(0))
        .collect();
    let height = panels.iter().map(|(_, l)| l.len()).max().unwrap_or(0);
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                s.push_str(GAP);
            }
            let _ = write!(s, "{cell:<w$}", w = widths[i]);
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(panels.iter().map(|(t, _)| *t).collect());
    for row in 0..height {
        line(
            panels
                .iter()
                .map(|(_, l)| l.get(row).map_or("", String::as_str))
                .collect(),
        );
    }
    out
}

/// Examples, test pairs and, if given, a model attempt checked against
/// test pair 0.
pub fn render_puzzle(puzzle: &Puzzle, attempt: Option<&ParseOutcome>) -> String {
    let mut out = format!("Puzzle {} (level {})", puzzle.id, puzzle.level);
    if puzzle.ruleless {
        out.push_str(" [random pattern]");
    }
    out.push_str("\n\n");
    for (i, pair) in puzzle.train.iter().enumerate() {
        let _ = writeln!(out, "Example {}", i + 1);
        out.push_str(&side_by_side(&[
            ("Before", render_grid(&pair.input)),
            ("After", render_grid(&pair.output)),
        ]));
        out.push('\n');
    }
    for (i, pair) in puzzle.test.iter().enumerate() {
        let _ = writeln!(out, "Test {}", i + 1);
        let mut panels = vec![
            ("Test input", render_grid(&pair.input)),
            ("Expected", render_grid(&pair.output)),
        ];
        if i == 0 {
            if let Some(ParseOutcome::Parsed { grid }) = attempt {
                panels.push(("Attempt", render_grid(grid)));
                panels.push(("Diff", diff_marks(&pair.output, grid)));
            }
        }
        out.push_str(&side_by_side(&panels));
        out.push('\n');
    }
    match attempt {
        Some(ParseOutcome::Parsed { grid }) => {
            if let Ok(v) = check_solution(grid, puzzle, 0) {
                let _ = writeln!(
                    out,
                    "Attempt: {:?}, {} mismatching cells{}",
                    v.status,
                    v.mismatch_count,
                    if v.dims_match { "" } else { " (dimensions differ)" }
                );
            }
        }
        Some(ParseOutcome::Failed { failure }) => {
            let _ = writeln!(out, "Attempt could not be read: {failure}");
        }
        None => {}
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell() {
        let g = Grid::from_rows(&[[7]]).unwrap();
        assert_eq!(render_grid(&g), ["7"]);
    }

    #[test]
    fn panels_align() {
        let a = Grid::from_rows(&[[1, 2], [3, 4]]).unwrap();
        let b = Grid::from_rows(&[[5]]).unwrap();
        let text = side_by_side(&[("A", render_grid(&a)), ("Longer", render_grid(&b))]);
        assert_eq!(text, "A      Longer\n1 2    5\n3 4\n");
    }

    #[test]
    fn marks_on_dims_mismatch_cover_expected() {
        let e = Grid::from_rows(&[[1, 2], [3, 4]]).unwrap();
        let a = Grid::from_rows(&[[1, 2, 0]]).unwrap();
        assert_eq!(count_marks(&diff_marks(&e, &a)), 4);
        assert_eq!(count_marks(&diff_marks(&e, &e)), 0);
    }
}
