use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};

use anyhow::Result;
use serde::{Deserialize, Serialize};

pub const CSV_HEADER: &str = "puzzle_id,level,model,num_examples,attempt,outcome,mismatch_count,latency_ms";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Outcome {
    Correct,
    Incorrect,
    ParseFailure,
    TransportError,
}

/// One row of the results CSV.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub puzzle_id: String,
    pub level: u8,
    pub model: String,
    /// As requested by the plan, even when the puzzle has fewer train pairs.
    pub num_examples: usize,
    pub attempt: usize,
    pub outcome: Outcome,
    /// Empty unless a grid was parsed and checked.
    pub mismatch_count: Option<usize>,
    pub latency_ms: u64,
}

impl BenchRecord {
    pub fn sort_key(&self) -> (&str, &str, usize, usize) {
        (&self.puzzle_id, &self.model, self.num_examples, self.attempt)
    }
}

pub fn sort_records(records: &mut [BenchRecord]) {
    records.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}

pub fn write_csv<W: Write>(out: W, records: &[BenchRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    if records.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<BenchRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    anyhow::ensure!(
        header.join(",") == CSV_HEADER,
        "unexpected CSV header {:?}",
        header.join(",")
    );
    Ok(rdr.deserialize().collect::<Result<_, _>>()?)
}

/// The raw reply behind one CSV row, kept in a JSONL file next to the CSV.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttemptText {
    pub puzzle_id: String,
    pub model: String,
    pub num_examples: usize,
    pub attempt: usize,
    pub text: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModelSummary {
    pub records: usize,
    pub correct: usize,
    pub parse_failures: usize,
    pub transport_errors: usize,
}

impl ModelSummary {
    pub fn correct_rate(&self) -> f64 {
        ratio(self.correct, self.records)
    }

    pub fn parse_failure_rate(&self) -> f64 {
        ratio(self.parse_failures, self.records)
    }
}

fn ratio(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        n as f64 / d as f64
    }
}

/// Per-model totals, keyed by model id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary(pub BTreeMap<String, ModelSummary>);

impl Summary {
    pub fn of(records: &[BenchRecord]) -> Summary {
        let mut by_model: BTreeMap<String, ModelSummary> = BTreeMap::new();
        for r in records {
            let s = by_model.entry(r.model.clone()).or_default();
            s.records += 1;
            match r.outcome {
                Outcome::Correct => s.correct += 1,
                Outcome::ParseFailure => s.parse_failures += 1,
                Outcome::TransportError => s.transport_errors += 1,
                Outcome::Incorrect => {}
            }
        }
        Summary(by_model)
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<16} {:>7} {:>7} {:>12} {:>18} {:>10}",
            "model", "cells", "correct", "correct_rate", "parse_failure_rate", "transport"
        )?;
        for (model, s) in &self.0 {
            writeln!(
                f,
                "{:<16} {:>7} {:>7} {:>12.3} {:>18.3} {:>10}",
                model,
                s.records,
                s.correct,
                s.correct_rate(),
                s.parse_failure_rate(),
                s.transport_errors
            )?;
        }
        Ok(())
    }
}
