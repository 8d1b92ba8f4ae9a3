//! Batch runs of models over the puzzle set: plans, CSV records,
//! manifest validation and terminal rendering.

pub mod attempts;
pub mod plan;
pub mod record;
pub mod render;
pub mod run;
pub mod validate;

pub use attempts::{load_attempt, read_texts, sidecar_path, write_texts, AttemptFilter};
pub use plan::{BenchPlan, Cell};
pub use record::{read_csv, write_csv, AttemptText, BenchRecord, ModelSummary, Outcome, Summary, CSV_HEADER};
pub use render::{count_marks, diff_marks, render_grid, render_puzzle, side_by_side};
pub use run::{run_bench, BenchRun};
pub use validate::{validate_set, ReportRow, RowStatus, ValidationReport, Violation};
