//! Parameter assignment for ordered data points (uniform, chord length,
//! centripetal) and clamped knot-vector construction for a requested
//! spline space dimension.

use crate::error::{Error, Result};
use crate::geometry::{validate_knots, KnotVector, ParamMethod, ParameterVector, Point2, SpaceViolation};

/// Equally spaced parameters `t_k = k / (m - 1)` on [0, 1].
pub fn uniform_params(points: &[Point2]) -> Result<ParameterVector> {
    let m = require_at_least_two(points)?;
    let steps = (m - 1) as f64;
    ParameterVector::new((0..m).map(|k| k as f64 / steps).collect())
}

/// The textbook-literal uniform rule `t_1 = 0, t_i = i / m` whose first
/// gap is `2/m`, twice the others. Kept for fidelity experiments; the
/// default uniform rule fixes the spacing.
pub fn uniform_literal_params(points: &[Point2]) -> Result<ParameterVector> {
    let m = require_at_least_two(points)?;
    let mf = m as f64;
    let values = (0..m)
        .map(|k| if k == 0 { 0.0 } else { (k + 1) as f64 / mf })
        .collect();
    ParameterVector::new(values)
}

/// Parameters with increments proportional to consecutive chord lengths,
/// normalized so the last value is 1. Coincident consecutive points give
/// zero increments; all points coincident is an error.
pub fn chord_length_params(points: &[Point2]) -> Result<ParameterVector> {
    accumulate_normalized(points, |a, b| a.distance(b))
}

/// As `chord_length_params` with square-rooted chord lengths.
pub fn centripetal_params(points: &[Point2]) -> Result<ParameterVector> {
    accumulate_normalized(points, |a, b| a.distance(b).sqrt())
}

/// Dispatch on the parametrization method.
pub fn parameters(method: ParamMethod, points: &[Point2]) -> Result<ParameterVector> {
    match method {
        ParamMethod::Uniform => uniform_params(points),
        ParamMethod::UniformLiteral => uniform_literal_params(points),
        ParamMethod::ChordLength => chord_length_params(points),
        ParamMethod::Centripetal => centripetal_params(points),
    }
}

fn require_at_least_two(points: &[Point2]) -> Result<usize> {
    if points.len() < 2 {
        return Err(Error::Argument(format!(
            "parametrization needs at least 2 points, got {}",
            points.len()
        )));
    }
    Ok(points.len())
}

fn accumulate_normalized(
    points: &[Point2],
    chord: impl Fn(&Point2, Point2) -> f64,
) -> Result<ParameterVector> {
    let m = require_at_least_two(points)?;
    let mut cumulative = Vec::with_capacity(m);
    cumulative.push(0.0);
    let mut total = 0.0;
    for w in points.windows(2) {
        total += chord(&w[0], w[1]);
        cumulative.push(total);
    }
    if total == 0.0 {
        return Err(Error::Degenerate(
            "all points coincide; chord parametrization undefined".into(),
        ));
    }
    let values = cumulative
        .iter()
        .enumerate()
        .map(|(k, &c)| if k == m - 1 { 1.0 } else { c / total })
        .collect();
    ParameterVector::new(values)
}

/// Build a clamped knot vector of length `n + d + 1` for the given
/// parameters: `d + 1` copies of the first parameter, `d + 1` copies of
/// the last, and `n - d - 1` interior knots at empirical quantiles of
/// the parameter values (levels `j / (n - d)`).
///
/// The result is guaranteed to satisfy the least-squares gap condition
/// `t[i+d+1] > t[i]`; if the parameters are too clumped for that, a
/// fit-infeasible error names the first violated index.
pub fn knots_from_params(params: &ParameterVector, n: usize, d: usize) -> Result<KnotVector> {
    let m = params.len();
    if n < d + 1 {
        return Err(Error::Argument(format!(
            "dimension n = {n} must be at least d + 1 = {}",
            d + 1
        )));
    }
    if m <= n {
        return Err(Error::Argument(format!(
            "need more data points than basis functions (m > n), got m = {m}, n = {n}"
        )));
    }
    let ts = params.as_slice();
    let mut knots = Vec::with_capacity(n + d + 1);
    knots.extend(std::iter::repeat_n(ts[0], d + 1));
    let segments = (n - d) as f64;
    for j in 1..n - d {
        knots.push(quantile(ts, j as f64 / segments));
    }
    knots.extend(std::iter::repeat_n(ts[m - 1], d + 1));

    let validity = validate_knots(d, &knots);
    if let Some(v) = validity.violations.first() {
        return match v {
            SpaceViolation::GapTooSmall { index } => Err(Error::FitInfeasible { index: *index }),
            other => Err(Error::Argument(format!(
                "constructed knot vector invalid: {other}"
            ))),
        };
    }
    KnotVector::new(knots)
}

/// Empirical quantile with linear interpolation between order statistics
/// (the values are already sorted because parameters are nondecreasing).
fn quantile(sorted: &[f64], level: f64) -> f64 {
    let h = level * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 >= sorted.len() {
        return sorted[sorted.len() - 1];
    }
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}
