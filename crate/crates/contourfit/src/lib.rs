//! Least-squares spline approximation of plane contours.
//!
//! The pipeline has three parts: contour acquisition from a silhouette
//! image (threshold binarization plus Moore-neighbor boundary tracing) or
//! from a point list; a parametric B-spline least-squares fit through the
//! banded normal equations, with uniform, chord-length and centripetal
//! parametrizations; and output emission (coefficient file, fit report,
//! SVG plot).
//!
//! The library layers match the pipeline:
//! - [`geometry`]: shared value types (points, knot vectors, spaces,
//!   curves, fit reports) and their validation
//! - [`eval`]: basis-function and curve evaluation by two independent
//!   recursions
//! - [`parametrize`]: parameter assignment and clamped knot construction
//! - [`fit`]: collocation matrix, normal-system solver, fit drivers
//! - [`contour`]: image decoding, binarization, boundary tracing, CSV
//! - [`plot`] / [`report`]: output files
//! - [`cli`]: the command-line frontend

pub mod cli;
pub mod contour;
pub mod error;
pub mod eval;
pub mod fit;
pub mod geometry;
pub mod parametrize;
pub mod plot;
pub mod report;

pub use contour::{binarize, load_image, load_points_csv, trace_boundary, Contour, GrayImage, Threshold};
pub use error::{Error, Result};
pub use eval::{basis_row, basis_value, eval_bform, eval_deboor, find_span, sample_curve, BasisRow};
pub use fit::{
    collocation_matrix, curve_lse, fit_parametric_curve, fit_scalar, solve_normal,
    solve_normal_multi, CollocationMatrix, ScalarFit, SolveDiagnostics,
};
pub use geometry::{
    validate_knots, FitReport, KnotVector, ParamMethod, ParameterVector, Point2, SpaceValidity,
    SpaceViolation, SplineCurve, SplineSpace,
};
pub use parametrize::{
    centripetal_params, chord_length_params, knots_from_params, parameters, uniform_literal_params,
    uniform_params,
};
