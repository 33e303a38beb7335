//! Error type shared by the whole pipeline, with the exit-code mapping
//! used by the command-line frontend.

use std::io;

/// Errors produced anywhere in the fitting pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller-supplied argument is structurally wrong (sizes, ranges, flags).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A parameter value lies outside the curve's evaluation domain.
    #[error("parameter {value} outside evaluation domain [{start}, {end}]")]
    OutOfDomain { value: f64, start: f64, end: f64 },

    /// As `OutOfDomain`, raised while assembling a collocation matrix;
    /// carries the index of the offending parameter.
    #[error("parameter #{index} ({value}) outside evaluation domain [{start}, {end}]")]
    ParamOutOfDomain {
        index: usize,
        value: f64,
        start: f64,
        end: f64,
    },

    /// An index does not address a valid basis function or knot.
    #[error("index {index} out of range for {what} (length {len})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    /// Input data admits no meaningful answer (e.g. all points coincident).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The requested spline space cannot support a least-squares fit on
    /// these parameters: the knot gap condition fails at `index`.
    #[error("fit infeasible: knot gap condition t[i+d+1] > t[i] violated at i = {index}")]
    FitInfeasible { index: usize },

    /// The normal matrix is singular or numerically rank deficient.
    #[error("rank-deficient normal system: estimated rank {estimated_rank} of {dimension}; \
             basis functions without data support: {empty_support:?}")]
    RankDeficient {
        estimated_rank: usize,
        dimension: usize,
        empty_support: Vec<usize>,
    },

    /// A solve completed but failed its own residual-orthogonality check.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Image file could not be decoded; `offset` is the byte position
    /// where parsing failed.
    #[error("image parse error at byte {offset}: {message}")]
    ImageParse { offset: usize, message: String },

    /// Point-list file could not be decoded; `line` is 1-based.
    #[error("csv parse error at line {line}: {message}")]
    CsvParse { line: usize, message: String },

    /// Contour extraction failed (empty foreground, unusable component...).
    #[error("contour extraction failed: {0}")]
    Extraction(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 argument errors, 3 input/extraction
    /// errors, 4 fit-infeasible or rank errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Argument(_)
            | Error::OutOfDomain { .. }
            | Error::ParamOutOfDomain { .. }
            | Error::IndexOutOfRange { .. } => 2,
            Error::Degenerate(_)
            | Error::ImageParse { .. }
            | Error::CsvParse { .. }
            | Error::Extraction(_)
            | Error::Io(_) => 3,
            Error::FitInfeasible { .. } | Error::RankDeficient { .. } | Error::Numerical(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
