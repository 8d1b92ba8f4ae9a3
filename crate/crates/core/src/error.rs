use thiserror::Error;

/// Errors raised by grid construction, editing tools and the task codec.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PuzzleError {
    #[error("malformed task document: {0}")]
    MalformedDocument(String),

    #[error("ragged grid at {location}: row {row} has {found} cells, expected {expected}")]
    RaggedGrid {
        location: String,
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("color {value} out of range 0..=9 at {location}")]
    ColorOutOfRange { location: String, value: i64 },

    #[error("grid dimensions {rows}x{cols} out of range 1..=30 at {location}")]
    DimsOutOfRange {
        location: String,
        rows: usize,
        cols: usize,
    },

    #[error("task document has no {0} section")]
    MissingSection(&'static str),

    #[error("cell ({row}, {col}) is outside a {rows}x{cols} grid")]
    OutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("invalid selection: {0}")]
    InvalidSelection(String),

    #[error("test index {index} out of range ({len} test pairs)")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("level {0} out of range 1..=4")]
    LevelOutOfRange(i64),

    #[error("a generated puzzle needs at least one train pair")]
    ZeroTrain,

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("duplicate puzzle id {0:?}")]
    DuplicateId(String),

    #[error("puzzle {id:?}: {source}")]
    InPuzzle {
        id: String,
        #[source]
        source: Box<PuzzleError>,
    },
}

impl PuzzleError {
    /// Stable machine-readable code, used by the wire API and CLI exit reporting.
    pub fn code(&self) -> &'static str {
        match self {
            PuzzleError::MalformedDocument(_) => "malformed_document",
            PuzzleError::RaggedGrid { .. } => "ragged_grid",
            PuzzleError::ColorOutOfRange { .. } => "color_out_of_range",
            PuzzleError::DimsOutOfRange { .. } => "dims_out_of_range",
            PuzzleError::MissingSection(_) => "missing_section",
            PuzzleError::OutOfBounds { .. } => "out_of_bounds",
            PuzzleError::InvalidSelection(_) => "invalid_selection",
            PuzzleError::IndexOutOfRange { .. } => "index_out_of_range",
            PuzzleError::LevelOutOfRange(_) => "level_out_of_range",
            PuzzleError::ZeroTrain => "zero_train",
            PuzzleError::Manifest(_) => "manifest_error",
            PuzzleError::DuplicateId(_) => "duplicate_id",
            PuzzleError::InPuzzle { source, .. } => source.code(),
        }
    }

    /// Strips any `InPuzzle` annotation.
    pub fn root(&self) -> &PuzzleError {
        match self {
            PuzzleError::InPuzzle { source, .. } => source.root(),
            other => other,
        }
    }

    pub(crate) fn in_puzzle(self, id: &str) -> Self {
        PuzzleError::InPuzzle {
            id: id.to_string(),
            source: Box::new(self),
        }
    }
}

pub type Result<T, E = PuzzleError> = std::result::Result<T, E>;
