use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use puzzlers_llm::{parse_grid_response, ParseOutcome};

use crate::record::{read_csv, AttemptText, CSV_HEADER};

/// `results.csv` keeps its raw replies in `results.attempts.jsonl`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("attempts.jsonl")
}

pub fn write_texts(path: &Path, texts: &[AttemptText]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for t in texts {
        serde_json::to_writer(&mut w, t)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_texts(path: &Path) -> Result<Vec<AttemptText>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    BufReader::new(file)
        .lines()
        .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|l| Ok(serde_json::from_str(&l?)?))
        .collect()
}

#[derive(Debug, Clone, Default)]
pub struct AttemptFilter {
    pub model: Option<String>,
    pub num_examples: Option<usize>,
    pub attempt: Option<usize>,
}

/// Reads a model attempt for `puzzle_id` from either a results CSV (with
/// its sidecar) or a plain text file holding one raw reply.
pub fn load_attempt(path: &Path, puzzle_id: &str, filter: &AttemptFilter) -> Result<ParseOutcome> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    if !bytes.starts_with(CSV_HEADER.as_bytes()) {
        return Ok(parse_grid_response(&String::from_utf8_lossy(&bytes)).into());
    }
    let record = read_csv(&bytes[..])?
        .into_iter()
        .find(|r| {
            r.puzzle_id == puzzle_id
                && filter.model.as_ref().is_none_or(|m| *m == r.model)
                && filter.num_examples.is_none_or(|n| n == r.num_examples)
                && filter.attempt.is_none_or(|a| a == r.attempt)
        })
        .ok_or_else(|| anyhow!("no matching row for puzzle {puzzle_id:?} in {}", path.display()))?;
    let sidecar = sidecar_path(path);
    let text = read_texts(&sidecar)?
        .into_iter()
        .find(|t| {
            t.puzzle_id == record.puzzle_id
                && t.model == record.model
                && t.num_examples == record.num_examples
                && t.attempt == record.attempt
        })
        .ok_or_else(|| anyhow!("{} has no reply for the selected row", sidecar.display()))?;
    Ok(parse_grid_response(&text.text).into())
}
