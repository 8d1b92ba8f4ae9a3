use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Instant;

use anyhow::Result;
use puzzlers_core::{check_solution, PuzzleSet, VerdictStatus};
use puzzlers_llm::{solve, ParseOutcome, Provider, SolveConfig};

use crate::plan::{BenchPlan, Cell};
use crate::record::{AttemptText, BenchRecord, Outcome};

/// Sorted records plus the raw reply text behind each one, in the same order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchRun {
    pub records: Vec<BenchRecord>,
    pub texts: Vec<AttemptText>,
}

/// Runs every plan cell against test pair 0 of its puzzle, at most
/// `parallel` at a time. Provider errors become `TransportError` rows.
pub fn run_bench(
    plan: &BenchPlan,
    set: &PuzzleSet,
    provider: &dyn Provider,
    parallel: usize,
) -> Result<BenchRun> {
    let cells = plan.cells(set)?;
    let next = AtomicUsize::new(0);
    let done = Mutex::new(Vec::with_capacity(cells.len()));

    thread::scope(|scope| {
        for _ in 0..parallel.clamp(1, cells.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(cell) = cells.get(i) else { break };
                let row = run_cell(cell, plan.seed, provider);
                done.lock().unwrap().push(row);
            });
        }
    });

    let mut rows = done.into_inner().unwrap();
    rows.sort_by(|a, b| a.0.sort_key().cmp(&b.0.sort_key()));
    let (records, texts) = rows.into_iter().unzip();
    Ok(BenchRun { records, texts })
}

fn run_cell(cell: &Cell<'_>, seed: u64, provider: &dyn Provider) -> (BenchRecord, AttemptText) {
    let puzzle = cell.puzzle;
    let mut config = SolveConfig::new(cell.model.clone(), cell.num_examples.min(puzzle.train.len()));
    config.request_seed = Some(seed.wrapping_add(cell.attempt as u64));

    let started = Instant::now();
    let (outcome, mismatch_count, latency, text) = match solve(puzzle, 0, &config, provider) {
        Ok(attempt) => {
            let (outcome, mismatch) = match &attempt.parsed {
                ParseOutcome::Parsed { grid } => match check_solution(grid, puzzle, 0) {
                    Ok(v) if v.status == VerdictStatus::Correct => (Outcome::Correct, Some(0)),
                    Ok(v) if v.status == VerdictStatus::Incorrect => {
                        (Outcome::Incorrect, Some(v.mismatch_count))
                    }
                    // ruleless puzzles have nothing to score against
                    _ => (Outcome::Incorrect, None),
                },
                ParseOutcome::Failed { .. } => (Outcome::ParseFailure, None),
            };
            (outcome, mismatch, attempt.raw.latency, attempt.raw.text)
        }
        Err(e) => (Outcome::TransportError, None, started.elapsed(), e.to_string()),
    };

    let record = BenchRecord {
        puzzle_id: puzzle.id.clone(),
        level: puzzle.level.get(),
        model: cell.model.to_string(),
        num_examples: cell.num_examples,
        attempt: cell.attempt,
        outcome,
        mismatch_count,
        latency_ms: latency.as_millis() as u64,
    };
    let text = AttemptText {
        puzzle_id: record.puzzle_id.clone(),
        model: record.model.clone(),
        num_examples: record.num_examples,
        attempt: record.attempt,
        text,
    };
    (record, text)
}
