//! ARC task documents and puzzle-set manifests.
//!
//! A task document is `{"train": [{"input": rows, "output": rows}, ...],
//! "test": [...]}` where `rows` is a list of integer lists. Generated
//! (ruleless) puzzles additionally carry `"ruleless": true`; readers of the
//! public dataset ignore the extra key.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{PuzzleError, Result};
use crate::grid::Grid;
use crate::puzzle::{ExamplePair, Level, Puzzle, PuzzleSet};

/// Parses one ARC task document.
pub fn parse_puzzle(raw: &[u8], id: &str, level: i64) -> Result<Puzzle> {
    let level = Level::new(level)?;
    let doc: Value = serde_json::from_slice(raw)
        .map_err(|e| PuzzleError::MalformedDocument(e.to_string()))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| PuzzleError::MalformedDocument("top level is not an object".into()))?;

    let train = parse_section(obj, "train")?;
    let test = parse_section(obj, "test")?;
    let ruleless = match obj.get("ruleless") {
        None => false,
        Some(Value::Bool(b)) => *b,
        Some(_) => {
            return Err(PuzzleError::MalformedDocument(
                "\"ruleless\" must be a boolean".into(),
            ))
        }
    };

    let mut puzzle = Puzzle::new(id, level, train, test)?;
    puzzle.ruleless = ruleless;
    Ok(puzzle)
}

fn parse_section(obj: &Map<String, Value>, name: &'static str) -> Result<Vec<ExamplePair>> {
    let pairs = match obj.get(name) {
        None | Some(Value::Null) => return Err(PuzzleError::MissingSection(name)),
        Some(Value::Array(a)) => a,
        Some(_) => {
            return Err(PuzzleError::MalformedDocument(format!(
                "\"{name}\" is not a list"
            )))
        }
    };
    if pairs.is_empty() {
        return Err(PuzzleError::MissingSection(name));
    }
    pairs
        .iter()
        .enumerate()
        .map(|(i, pair)| {
            let pair = pair.as_object().ok_or_else(|| {
                PuzzleError::MalformedDocument(format!("{name}[{i}] is not an object"))
            })?;
            Ok(ExamplePair {
                input: parse_grid_value(pair.get("input"), &format!("{name}[{i}].input"))?,
                output: parse_grid_value(pair.get("output"), &format!("{name}[{i}].output"))?,
            })
        })
        .collect()
}

fn parse_grid_value(value: Option<&Value>, location: &str) -> Result<Grid> {
    let malformed = |what: &str| PuzzleError::MalformedDocument(format!("{location}: {what}"));
    let rows = value
        .ok_or_else(|| malformed("missing"))?
        .as_array()
        .ok_or_else(|| malformed("not a list of rows"))?;
    let mut parsed = Vec::with_capacity(rows.len());
    for row in rows {
        let row = row.as_array().ok_or_else(|| malformed("row is not a list"))?;
        let mut cells = Vec::with_capacity(row.len());
        for cell in row {
            let v = match cell {
                Value::Number(n) if n.is_i64() => n.as_i64().unwrap_or_default(),
                // Integers too large for i64 are still integers, just not colors.
                Value::Number(n) if n.is_u64() => i64::MAX,
                _ => return Err(malformed("cell is not an integer")),
            };
            cells.push(v);
        }
        parsed.push(cells);
    }
    Grid::from_rows_at(&parsed, location)
}

#[derive(Serialize)]
struct PairDoc<'a> {
    input: &'a Grid,
    output: &'a Grid,
}

#[derive(Serialize)]
struct TaskDoc<'a> {
    train: Vec<PairDoc<'a>>,
    test: Vec<PairDoc<'a>>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    ruleless: bool,
}

/// Writes a puzzle back out as an ARC task document.
pub fn serialize_puzzle(puzzle: &Puzzle) -> String {
    fn pairs(ps: &[ExamplePair]) -> Vec<PairDoc<'_>> {
        ps.iter()
            .map(|p| PairDoc {
                input: &p.input,
                output: &p.output,
            })
            .collect()
    }
    let doc = TaskDoc {
        train: pairs(&puzzle.train),
        test: pairs(&puzzle.test),
        ruleless: puzzle.ruleless,
    };
    serde_json::to_string(&doc).expect("task documents always serialize")
}

/// One manifest line: which task file to load and at what level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub level: i64,
    pub path: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub puzzles: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn parse(bytes: &[u8]) -> Result<Manifest> {
        serde_json::from_slice(bytes).map_err(|e| PuzzleError::Manifest(e.to_string()))
    }
}

/// Loads every puzzle a manifest names, in manifest order. `resolve` maps a
/// manifest entry to the task document bytes.
pub fn load_puzzle_set<F>(manifest_bytes: &[u8], mut resolve: F) -> Result<PuzzleSet>
where
    F: FnMut(&ManifestEntry) -> std::result::Result<Vec<u8>, String>,
{
    let manifest = Manifest::parse(manifest_bytes)?;
    let mut set = PuzzleSet::new(manifest.version.clone(), Vec::new())?;
    for entry in &manifest.puzzles {
        if set.get(&entry.id).is_some() {
            return Err(PuzzleError::DuplicateId(entry.id.clone()));
        }
        let raw = resolve(entry)
            .map_err(|e| PuzzleError::Manifest(format!("cannot read {}: {e}", entry.path)))
            .map_err(|e| e.in_puzzle(&entry.id))?;
        let puzzle = parse_puzzle(&raw, &entry.id, entry.level).map_err(|e| e.in_puzzle(&entry.id))?;
        set.push(puzzle)?;
    }
    Ok(set)
}

/// Loads a manifest from disk; entry paths are relative to the manifest's directory.
pub fn load_puzzle_set_from_path(manifest_path: &Path) -> Result<PuzzleSet> {
    let bytes = std::fs::read(manifest_path).map_err(|e| {
        PuzzleError::Manifest(format!("cannot read {}: {e}", manifest_path.display()))
    })?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    load_puzzle_set(&bytes, |entry| {
        std::fs::read(base.join(&entry.path)).map_err(|e| e.to_string())
    })
}

macro_rules! bundled_files {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_bytes!(concat!(env!("CARGO_MANIFEST_DIR"), "/puzzles/", $name)))),*]
    };
}

static BUNDLED_MANIFEST: &[u8] =
    include_bytes!(concat!(env!("CARGO_MANIFEST_DIR"), "/puzzles/manifest.json"));

static BUNDLED_FILES: &[(&str, &[u8])] = bundled_files![
    "6150a2bd.json",
    "67a3c6ac.json",
    "c8f0f002.json",
    "d511f180.json",
    "a416b8f3.json",
    "d037b0a7.json",
    "a79310a0.json",
    "6f8cd79b.json",
    "aabf363d.json",
    "00d62c1b.json",
    "a699fb00.json",
    "4258a5f9.json",
];

/// Path of the on-disk bundled manifest (useful for CLIs and tests).
pub fn bundled_manifest_path() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/puzzles/manifest.json"))
}

/// The 12-puzzle set compiled into the binary.
pub fn bundled_puzzle_set() -> PuzzleSet {
    load_puzzle_set(BUNDLED_MANIFEST, |entry| {
        BUNDLED_FILES
            .iter()
            .find(|(name, _)| *name == entry.path)
            .map(|(_, bytes)| bytes.to_vec())
            .ok_or_else(|| "not bundled".to_string())
    })
    .expect("bundled puzzle set is valid")
}
