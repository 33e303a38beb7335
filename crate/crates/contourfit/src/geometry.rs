//! Domain types shared by the whole crate: points, parameter vectors,
//! knot vectors, spline spaces and curves, and the fit report.
//!
//! Everything here is an immutable value object; algorithms live in the
//! sibling modules. All scalars are `f64` and finiteness is checked at
//! construction so no NaN can reach the solver.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::time::Duration;

use crate::error::{Error, Result};

/// A point of the plane: a contour sample or a control point.
///
/// Image-sourced points use raster orientation (y grows downward).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Point2 {
        Point2 { x, y }
    }

    /// Constructor that rejects NaN and infinities.
    pub fn try_new(x: f64, y: f64) -> Result<Point2> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::Argument(format!(
                "point coordinates must be finite, got ({x}, {y})"
            )));
        }
        Ok(Point2 { x, y })
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Euclidean distance to another point.
    pub fn distance(&self, other: Point2) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Parameter values assigned to an ordered set of data points.
///
/// Nondecreasing, starts at 0, at least two entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterVector {
    values: Vec<f64>,
}

impl ParameterVector {
    pub fn new(values: Vec<f64>) -> Result<ParameterVector> {
        if values.len() < 2 {
            return Err(Error::Argument(format!(
                "parameter vector needs at least 2 values, got {}",
                values.len()
            )));
        }
        if values[0] != 0.0 {
            return Err(Error::Argument(format!(
                "parameter vector must start at 0, got {}",
                values[0]
            )));
        }
        for (i, w) in values.windows(2).enumerate() {
            if !w[1].is_finite() {
                return Err(Error::Argument(format!(
                    "parameter #{} is not finite",
                    i + 1
                )));
            }
            if w[1] < w[0] {
                return Err(Error::Argument(format!(
                    "parameters must be nondecreasing, got {} after {} at index {}",
                    w[1],
                    w[0],
                    i + 1
                )));
            }
        }
        Ok(ParameterVector { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        *self.values.last().unwrap()
    }
}

impl std::ops::Index<usize> for ParameterVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

/// Nondecreasing knot sequence. A spline space of degree `d` and
/// dimension `n` stores the full vector of `n + d + 1` knots.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotVector {
    knots: Vec<f64>,
}

impl KnotVector {
    pub fn new(knots: Vec<f64>) -> Result<KnotVector> {
        if knots.len() < 2 {
            return Err(Error::Argument(format!(
                "knot vector needs at least 2 knots, got {}",
                knots.len()
            )));
        }
        for (i, k) in knots.iter().enumerate() {
            if !k.is_finite() {
                return Err(Error::Argument(format!("knot #{i} is not finite")));
            }
            if i > 0 && knots[i - 1] > *k {
                return Err(Error::Argument(format!(
                    "knots must be nondecreasing, got {} after {} at index {}",
                    k,
                    knots[i - 1],
                    i
                )));
            }
        }
        Ok(KnotVector { knots })
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.knots
    }
}

impl std::ops::Index<usize> for KnotVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.knots[i]
    }
}

/// One structural defect found while validating a spline space.
#[derive(Debug, Clone, PartialEq)]
pub enum SpaceViolation {
    /// Knot at `index` is NaN or infinite.
    NonFinite { index: usize },
    /// `knots[index] > knots[index + 1]`.
    Decreasing { index: usize },
    /// Too few knots: dimension `n = len - d - 1` is below `d + 1`.
    DimensionTooSmall { dimension: isize, degree: usize },
    /// Least-squares gap condition fails: `knots[index + d + 1] == knots[index]`
    /// (0-based index, `index < n`).
    GapTooSmall { index: usize },
}

impl fmt::Display for SpaceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceViolation::NonFinite { index } => write!(f, "knot #{index} is not finite"),
            SpaceViolation::Decreasing { index } => {
                write!(f, "knots decrease between indices {index} and {}", index + 1)
            }
            SpaceViolation::DimensionTooSmall { dimension, degree } => write!(
                f,
                "dimension n = {dimension} is below d + 1 = {}",
                degree + 1
            ),
            SpaceViolation::GapTooSmall { index } => {
                write!(f, "gap condition t[i+d+1] > t[i] fails at i = {index}")
            }
        }
    }
}

/// Outcome of validating a (degree, knots) pair. Validation never aborts;
/// it reports every violation it finds.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceValidity {
    pub violations: Vec<SpaceViolation>,
}

impl SpaceValidity {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Validate a raw knot sequence against every requirement a degree-`d`
/// spline space puts on it, including the least-squares gap condition
/// `knots[i + d + 1] > knots[i]` for `i = 0..n`.
pub fn validate_knots(degree: usize, knots: &[f64]) -> SpaceValidity {
    let mut violations = Vec::new();
    for (i, k) in knots.iter().enumerate() {
        if !k.is_finite() {
            violations.push(SpaceViolation::NonFinite { index: i });
        }
    }
    for i in 0..knots.len().saturating_sub(1) {
        if knots[i] > knots[i + 1] {
            violations.push(SpaceViolation::Decreasing { index: i });
        }
    }
    let dimension = knots.len() as isize - degree as isize - 1;
    if dimension < degree as isize + 1 {
        violations.push(SpaceViolation::DimensionTooSmall {
            dimension,
            degree,
        });
        return SpaceValidity { violations };
    }
    let n = dimension as usize;
    for i in 0..n {
        // Negated form also flags NaN gaps.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(knots[i + degree + 1] > knots[i]) {
            violations.push(SpaceViolation::GapTooSmall { index: i });
        }
    }
    SpaceValidity { violations }
}

/// Spline space of a given degree over a knot vector; the dimension is
/// `n = knots.len() - degree - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineSpace {
    degree: usize,
    knots: KnotVector,
}

impl SplineSpace {
    /// Build a space, requiring enough knots for a positive dimension
    /// `n >= d + 1`. The least-squares gap condition is *not* required
    /// here; query it through [`SplineSpace::validate`].
    pub fn new(degree: usize, knots: KnotVector) -> Result<SplineSpace> {
        let len = knots.len();
        if len < 2 * degree + 2 {
            return Err(Error::Argument(format!(
                "degree {degree} needs at least {} knots (n >= d+1), got {len}",
                2 * degree + 2
            )));
        }
        Ok(SplineSpace { degree, knots })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knots(&self) -> &KnotVector {
        &self.knots
    }

    pub fn knot(&self, i: usize) -> f64 {
        self.knots[i]
    }

    /// Number of basis functions spanning the space.
    pub fn dimension(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    /// Evaluation domain `[knots[d], knots[n]]`.
    pub fn domain(&self) -> (f64, f64) {
        (self.knots[self.degree], self.knots[self.dimension()])
    }

    /// Full validity report, including the least-squares gap condition.
    pub fn validate(&self) -> SpaceValidity {
        validate_knots(self.degree, self.knots.as_slice())
    }

    /// True when the gap condition `t[i+d+1] > t[i]` holds for all
    /// `i = 0..n`, the precondition for a well-posed least-squares fit.
    pub fn is_lsq_valid(&self) -> bool {
        self.validate().is_ok()
    }
}

/// A parametric spline curve: a space plus one control point per basis
/// function. The B-spline coefficients of each coordinate are the
/// corresponding components of the control points.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineCurve {
    space: SplineSpace,
    control: Vec<Point2>,
}

impl SplineCurve {
    pub fn new(space: SplineSpace, control: Vec<Point2>) -> Result<SplineCurve> {
        if control.len() != space.dimension() {
            return Err(Error::Argument(format!(
                "curve needs {} control points for this space, got {}",
                space.dimension(),
                control.len()
            )));
        }
        if let Some(i) = control.iter().position(|p| !p.is_finite()) {
            return Err(Error::Argument(format!(
                "control point #{i} is not finite"
            )));
        }
        Ok(SplineCurve { space, control })
    }

    pub fn space(&self) -> &SplineSpace {
        &self.space
    }

    pub fn control(&self) -> &[Point2] {
        &self.control
    }

    pub fn degree(&self) -> usize {
        self.space.degree()
    }

    pub fn domain(&self) -> (f64, f64) {
        self.space.domain()
    }
}

/// Parametrization rule used to assign parameter values to data points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamMethod {
    /// Equally spaced parameters `(i - 1) / (m - 1)`.
    Uniform,
    /// Literal textbook-variant uniform rule `t_1 = 0, t_i = i / m`,
    /// whose first gap is twice the others; kept for fidelity experiments.
    UniformLiteral,
    /// Increments proportional to chord lengths.
    ChordLength,
    /// Increments proportional to square roots of chord lengths.
    Centripetal,
}

impl ParamMethod {
    pub fn label(&self) -> &'static str {
        match self {
            ParamMethod::Uniform => "uniform",
            ParamMethod::UniformLiteral => "uniform-literal",
            ParamMethod::ChordLength => "chord",
            ParamMethod::Centripetal => "centripetal",
        }
    }

    pub fn from_label(s: &str) -> Result<ParamMethod> {
        match s {
            "uniform" => Ok(ParamMethod::Uniform),
            "uniform-literal" => Ok(ParamMethod::UniformLiteral),
            "chord" => Ok(ParamMethod::ChordLength),
            "centripetal" => Ok(ParamMethod::Centripetal),
            other => Err(Error::Argument(format!(
                "unknown parametrization method '{other}' \
                 (expected uniform, uniform-literal, chord or centripetal)"
            ))),
        }
    }
}

impl fmt::Display for ParamMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Result of fitting a parametric spline curve to a point sequence.
#[derive(Debug, Clone)]
pub struct FitReport {
    pub curve: SplineCurve,
    /// Sum of squared residuals, recomputed by evaluating the fitted
    /// curve at the data parameters.
    pub lse: f64,
    /// Norm of `B^t r` over both coordinates; near zero for a true
    /// least-squares minimizer.
    pub residual_orthogonality: f64,
    pub params_method: ParamMethod,
    /// Number of data points fitted.
    pub n_points: usize,
    pub wall_time: Duration,
}
