//! Grid <-> text. Grids go to the model as nested lists such as
//! `[[0, 2, 2], [0, 1, 1], [0, 0, 3]]` and come back the same way, usually
//! wrapped in prose or code fences.

use std::fmt;

use puzzlers_core::{Grid, PuzzleError};
use serde::{Deserialize, Serialize};

const EXCERPT_CHARS: usize = 120;

/// Canonical nested-list text for a grid.
pub fn serialize_grid(grid: &Grid) -> String {
    let mut out = String::with_capacity(grid.len() * 3 + 4);
    out.push('[');
    for (i, row) in grid.iter_rows().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push('[');
        for (j, cell) in row.iter().enumerate() {
            if j > 0 {
                out.push_str(", ");
            }
            out.push((b'0' + cell.index()) as char);
        }
        out.push(']');
    }
    out.push(']');
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParseFailureReason {
    NoGridFound,
    RaggedRows,
    ColorOutOfRange,
    DimsOutOfRange,
    UnbalancedBrackets,
}

/// Why a model reply could not be turned into a grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseFailure {
    pub reason: ParseFailureReason,
    /// At most 120 characters of the offending text, for humans only.
    pub excerpt: String,
}

impl ParseFailure {
    fn new(reason: ParseFailureReason, text: &str) -> Self {
        ParseFailure {
            reason,
            excerpt: text.chars().take(EXCERPT_CHARS).collect(),
        }
    }
}

impl fmt::Display for ParseFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} near {:?}", self.reason, self.excerpt)
    }
}

impl std::error::Error for ParseFailure {}

/// For every `[` in `bytes`, the index of its matching `]`, if any.
fn match_brackets(bytes: &[u8]) -> Vec<Option<usize>> {
    let mut matches = vec![None; bytes.len()];
    let mut stack = Vec::new();
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'[' => stack.push(i),
            b']' => {
                if let Some(open) = stack.pop() {
                    matches[open] = Some(i);
                }
            }
            _ => {}
        }
    }
    matches
}

fn next_non_ws(bytes: &[u8], from: usize) -> Option<usize> {
    (from..bytes.len()).find(|&i| !bytes[i].is_ascii_whitespace())
}

/// Byte offsets `(start, end_inclusive)` of balanced regions that open with
/// two brackets, in order of their opening bracket. The flag reports
/// whether any double-bracket opener never closed.
fn candidate_regions(bytes: &[u8]) -> (Vec<(usize, usize)>, bool) {
    let matches = match_brackets(bytes);
    let mut regions = Vec::new();
    let mut unbalanced = false;
    for i in 0..bytes.len() {
        if bytes[i] != b'[' {
            continue;
        }
        let Some(inner) = next_non_ws(bytes, i + 1) else {
            continue;
        };
        if bytes[inner] != b'[' {
            continue;
        }
        match matches[i] {
            Some(end) => regions.push((i, end)),
            None => unbalanced = true,
        }
    }
    (regions, unbalanced)
}

/// Small recursive-descent reader for `[[int, ...], ...]`.
struct ListReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl ListReader<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, b: u8) -> bool {
        self.skip_ws();
        if self.bytes.get(self.pos) == Some(&b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    /// Parses a comma-separated list between brackets, tolerating one
    /// trailing comma.
    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> Option<T>) -> Option<Vec<T>> {
        if !self.eat(b'[') {
            return None;
        }
        let mut out = Vec::new();
        if self.eat(b']') {
            return Some(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat(b']') {
                return Some(out);
            }
            if !self.eat(b',') {
                return None;
            }
            if self.eat(b']') {
                return Some(out);
            }
        }
    }

    fn int(&mut self) -> Option<i64> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.bytes.get(self.pos), Some(b'-' | b'+')) {
            self.pos += 1;
        }
        let digits = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits {
            return None;
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).ok()?;
        // Anything too large for i64 is certainly not a color.
        Some(text.parse().unwrap_or(i64::MAX))
    }

    fn grid_rows(&mut self) -> Option<Vec<Vec<i64>>> {
        let rows = self.list(|r| r.list(|r| r.int()))?;
        self.skip_ws();
        (self.pos == self.bytes.len()).then_some(rows)
    }
}

fn read_rows(region: &[u8]) -> Option<Vec<Vec<i64>>> {
    ListReader {
        bytes: region,
        pos: 0,
    }
    .grid_rows()
}

/// Extracts the first balanced nested integer list in `text` and validates
/// it as a grid. Never panics; every failure is reported as a [`ParseFailure`].
pub fn parse_grid_response(text: &str) -> Result<Grid, ParseFailure> {
    let bytes = text.as_bytes();
    let (regions, unbalanced) = candidate_regions(bytes);
    let mut parsed = regions
        .iter()
        .filter_map(|&(start, end)| read_rows(&bytes[start..=end]).map(|rows| (start, end, rows)));

    let Some((start, end, rows)) = parsed.next() else {
        let reason = if unbalanced {
            ParseFailureReason::UnbalancedBrackets
        } else {
            ParseFailureReason::NoGridFound
        };
        let excerpt_from = if unbalanced {
            text.find('[').unwrap_or(0)
        } else {
            0
        };
        return Err(ParseFailure::new(reason, &text[excerpt_from..]));
    };
    let extra = parsed.filter(|(s, _, _)| *s > end).count();
    if extra > 0 {
        tracing::debug!(extra, "reply contains more than one grid; using the first");
    }

    // Regions start and end on ASCII brackets, so these are char boundaries.
    let region = &text[start..=end];
    Grid::from_rows(&rows).map_err(|e| {
        let reason = match e {
            PuzzleError::RaggedGrid { .. } => ParseFailureReason::RaggedRows,
            PuzzleError::ColorOutOfRange { .. } => ParseFailureReason::ColorOutOfRange,
            _ => ParseFailureReason::DimsOutOfRange,
        };
        ParseFailure::new(reason, region)
    })
}
