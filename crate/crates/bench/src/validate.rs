use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use puzzlers_core::{parse_puzzle, Manifest, Puzzle, PuzzleError};

/// Violation classes, in exit-code order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    Manifest,
    Unreadable,
    Document,
    Grid,
    Level,
    DuplicateId,
}

impl Violation {
    pub fn exit_code(self) -> i32 {
        match self {
            Violation::Manifest => 2,
            Violation::Unreadable => 3,
            Violation::Document => 4,
            Violation::Grid => 5,
            Violation::Level => 6,
            Violation::DuplicateId => 7,
        }
    }

    fn of(e: &PuzzleError) -> Violation {
        match e.root() {
            PuzzleError::RaggedGrid { .. }
            | PuzzleError::ColorOutOfRange { .. }
            | PuzzleError::DimsOutOfRange { .. } => Violation::Grid,
            PuzzleError::LevelOutOfRange(_) => Violation::Level,
            PuzzleError::DuplicateId(_) => Violation::DuplicateId,
            PuzzleError::Manifest(_) => Violation::Manifest,
            _ => Violation::Document,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowStatus {
    Ok {
        train: usize,
        test: usize,
        test_dims: Vec<(usize, usize)>,
    },
    Failed {
        violation: Violation,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub id: String,
    pub level: i64,
    pub status: RowStatus,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub rows: Vec<ReportRow>,
    /// Set when the manifest itself could not be used.
    pub manifest_error: Option<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn first_violation(&self) -> Option<(&str, Violation)> {
        if self.manifest_error.is_some() {
            return Some(("manifest", Violation::Manifest));
        }
        self.rows.iter().find_map(|r| match &r.status {
            RowStatus::Failed { violation, .. } => Some((r.id.as_str(), *violation)),
            RowStatus::Ok { .. } => None,
        })
    }

    pub fn exit_code(&self) -> i32 {
        self.first_violation().map_or(0, |(_, v)| v.exit_code())
    }

    pub fn ok_count(&self) -> usize {
        self.rows.iter().filter(|r| matches!(r.status, RowStatus::Ok { .. })).count()
    }

    /// Valid puzzles per level 1..=4.
    pub fn level_counts(&self) -> [usize; 4] {
        let mut counts = [0; 4];
        for r in &self.rows {
            if let (RowStatus::Ok { .. }, 1..=4) = (&r.status, r.level) {
                counts[r.level as usize - 1] += 1;
            }
        }
        counts
    }
}

/// Checks the manifest and every puzzle it lists, reporting all of them.
pub fn validate_set(manifest_path: &Path) -> ValidationReport {
    let mut report = ValidationReport::default();
    let manifest = match std::fs::read(manifest_path)
        .map_err(|e| e.to_string())
        .and_then(|b| Manifest::parse(&b).map_err(|e| e.to_string()))
    {
        Ok(m) => m,
        Err(e) => {
            report.manifest_error = Some(format!("{}: {e}", manifest_path.display()));
            return report;
        }
    };
    let base = manifest_path.parent().unwrap_or(Path::new("."));

    let mut seen = HashSet::new();
    for entry in &manifest.puzzles {
        let status = if !seen.insert(entry.id.clone()) {
            RowStatus::Failed {
                violation: Violation::DuplicateId,
                message: format!("duplicate puzzle id {:?}", entry.id),
            }
        } else {
            match std::fs::read(base.join(&entry.path)) {
                Err(e) => RowStatus::Failed {
                    violation: Violation::Unreadable,
                    message: format!("{}: {e}", entry.path),
                },
                Ok(bytes) => match parse_puzzle(&bytes, &entry.id, entry.level) {
                    Ok(p) => ok_status(&p),
                    Err(e) => RowStatus::Failed {
                        violation: Violation::of(&e),
                        message: e.to_string(),
                    },
                },
            }
        };
        report.rows.push(ReportRow {
            id: entry.id.clone(),
            level: entry.level,
            status,
        });
    }

    if manifest.puzzles.is_empty() {
        report.warnings.push("manifest lists no puzzles".into());
    } else {
        for (i, n) in report.level_counts().iter().enumerate() {
            if *n == 0 {
                report.warnings.push(format!("level {} has no puzzles", i + 1));
            }
        }
    }
    report
}

fn ok_status(p: &Puzzle) -> RowStatus {
    RowStatus::Ok {
        train: p.train.len(),
        test: p.test.len(),
        test_dims: p.test.iter().map(|t| t.input.dims()).collect(),
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(e) = &self.manifest_error {
            return writeln!(f, "ERROR manifest: {e}");
        }
        for r in &self.rows {
            match &r.status {
                RowStatus::Ok { train, test, test_dims } => {
                    let dims: Vec<String> =
                        test_dims.iter().map(|(r, c)| format!("{r}x{c}")).collect();
                    writeln!(
                        f,
                        "OK    {:<12} level {}  train {}  test {}  dims {}",
                        r.id,
                        r.level,
                        train,
                        test,
                        dims.join(",")
                    )?;
                }
                RowStatus::Failed { message, .. } => {
                    writeln!(f, "ERROR {:<12} level {}  {message}", r.id, r.level)?;
                }
            }
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        let [l1, l2, l3, l4] = self.level_counts();
        writeln!(
            f,
            "{} of {} puzzles valid; levels 1-4: {l1}/{l2}/{l3}/{l4}",
            self.ok_count(),
            self.rows.len()
        )
    }
}
