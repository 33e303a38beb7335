//! B-spline basis and spline-curve evaluation.
//!
//! Two independent evaluation routes are provided and kept equivalent by
//! tests: `eval_deboor` runs the convex-combination recursion on control
//! points, `eval_bform` combines control points with basis values. Basis
//! values themselves come in two flavours: `basis_value` is the plain
//! two-term recursion (division by zero yields zero), `basis_row` is the
//! O(d^2) triangular scheme returning all d+1 values active at a span.
//!
//! Degree-0 intervals are half-open `[t_i, t_{i+1})`; the last nonempty
//! interval is additionally closed on the right so evaluation is
//! single-valued on the whole closed domain `[t_d, t_n]`.

use crate::error::{Error, Result};
use crate::geometry::{Point2, SplineCurve, SplineSpace};

/// The `d + 1` basis values that may be nonzero at one parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisRow {
    /// Span index `i` with `knots[i] <= t < knots[i+1]` (right-closed at
    /// the end of the domain).
    pub span: usize,
    /// `values[j] = B_{span - d + j, d}(t)` for `j = 0..=d`.
    pub values: Vec<f64>,
}

impl BasisRow {
    /// Index of the first (possibly) nonzero basis function.
    pub fn first_index(&self) -> usize {
        self.span + 1 - self.values.len()
    }
}

/// A fraction under the convention that division by zero is zero.
#[inline]
fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Largest index `i` with `knots[i] < knots[i+1]`, if any.
fn last_nonempty_span(knots: &[f64]) -> Option<usize> {
    (0..knots.len() - 1).rev().find(|&i| knots[i] < knots[i + 1])
}

/// Locate the knot span containing `t`: returns `i` with
/// `knots[i] <= t < knots[i+1]` and `d <= i <= n-1`. At the right end of
/// the evaluation domain the last nonempty span is returned, closing it
/// on the right.
pub fn find_span(space: &SplineSpace, t: f64) -> Result<usize> {
    let d = space.degree();
    let n = space.dimension();
    let knots = space.knots().as_slice();
    let (a, b) = space.domain();
    // Negated form also rejects NaN.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(t >= a && t <= b) {
        return Err(Error::OutOfDomain {
            value: t,
            start: a,
            end: b,
        });
    }
    if a == b {
        return Err(Error::Degenerate(format!(
            "evaluation domain [{a}, {b}] is a single point"
        )));
    }
    if t == b {
        // Closed right end: last span of the domain that has positive width.
        return (d..n)
            .rev()
            .find(|&i| knots[i] < knots[i + 1])
            .ok_or_else(|| Error::Degenerate("no nonempty span in domain".into()));
    }
    let mut lo = d;
    let mut hi = n;
    let mut mid = (lo + hi) / 2;
    while t < knots[mid] || t >= knots[mid + 1] {
        if t < knots[mid] {
            hi = mid;
        } else {
            lo = mid;
        }
        mid = (lo + hi) / 2;
    }
    Ok(mid)
}

/// Evaluate a single basis function `B_{i,j}(t)` by the two-term
/// recursion, resolving every division by zero to zero.
///
/// `i` is the 0-based basis index at degree level `j`; it must satisfy
/// `i + j + 1 < knots.len()`. Total in `t` (zero outside the support).
pub fn basis_value(space: &SplineSpace, i: usize, j: usize, t: f64) -> Result<f64> {
    let knots = space.knots().as_slice();
    if i + j + 1 >= knots.len() {
        return Err(Error::IndexOutOfRange {
            what: "basis function",
            index: i,
            len: knots.len().saturating_sub(j + 1),
        });
    }
    if !t.is_finite() {
        return Err(Error::Argument(format!("parameter must be finite, got {t}")));
    }
    let closing = last_nonempty_span(knots);
    Ok(basis_recursive(knots, i, j, t, closing))
}

fn basis_recursive(knots: &[f64], i: usize, j: usize, t: f64, closing: Option<usize>) -> f64 {
    if j == 0 {
        let inside = knots[i] <= t && t < knots[i + 1];
        let closes_end = closing == Some(i) && t == knots[i + 1];
        return if inside || closes_end { 1.0 } else { 0.0 };
    }
    // Support is [knots[i], knots[i+j+1]]; everything outside is zero.
    if t < knots[i] || t > knots[i + j + 1] {
        return 0.0;
    }
    let left = ratio(t - knots[i], knots[i + j] - knots[i]);
    let right = ratio(knots[i + 1 + j] - t, knots[i + 1 + j] - knots[i + 1]);
    let mut value = 0.0;
    if left != 0.0 {
        value += left * basis_recursive(knots, i, j - 1, t, closing);
    }
    if right != 0.0 {
        value += right * basis_recursive(knots, i + 1, j - 1, t, closing);
    }
    value
}

/// All potentially nonzero basis values of the space's degree at `t`,
/// computed by the in-place triangular scheme.
pub fn basis_row(space: &SplineSpace, t: f64) -> Result<BasisRow> {
    let span = find_span(space, t)?;
    let d = space.degree();
    let knots = space.knots().as_slice();
    let mut values = vec![0.0; d + 1];
    let mut left = vec![0.0; d + 1];
    let mut right = vec![0.0; d + 1];
    values[0] = 1.0;
    for j in 1..=d {
        left[j] = t - knots[span + 1 - j];
        right[j] = knots[span + j] - t;
        let mut saved = 0.0;
        for r in 0..j {
            let den = right[r + 1] + left[j - r];
            let temp = if den == 0.0 { 0.0 } else { values[r] / den };
            values[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        values[j] = saved;
    }
    Ok(BasisRow { span, values })
}

/// Evaluate the curve as a linear combination of control points and
/// basis values: `f(t) = sum_i p_i B_{i,d}(t)`.
pub fn eval_bform(curve: &SplineCurve, t: f64) -> Result<Point2> {
    let row = basis_row(curve.space(), t)?;
    let first = row.first_index();
    let mut acc = Point2::ORIGIN;
    for (j, &w) in row.values.iter().enumerate() {
        acc = acc + curve.control()[first + j] * w;
    }
    Ok(acc)
}

/// Evaluate the curve by the convex-combination recursion on control
/// points (divisions by zero resolve to zero, as in `basis_value`).
pub fn eval_deboor(curve: &SplineCurve, t: f64) -> Result<Point2> {
    let space = curve.space();
    let d = space.degree();
    let knots = space.knots().as_slice();
    let span = find_span(space, t)?;
    let mut work: Vec<Point2> = (0..=d)
        .map(|j| curve.control()[span - d + j])
        .collect();
    for r in 1..=d {
        for j in (r..=d).rev() {
            let lo = knots[span - d + j];
            let hi = knots[span + 1 + j - r];
            let den = hi - lo;
            if den == 0.0 {
                // Both fractions of the recursion vanish by convention.
                work[j] = Point2::ORIGIN;
            } else {
                let alpha = (t - lo) / den;
                work[j] = work[j - 1] * (1.0 - alpha) + work[j] * alpha;
            }
        }
    }
    Ok(work[d])
}

/// Evaluate the curve at `count` parameters equally spaced over the
/// evaluation domain, endpoints included.
pub fn sample_curve(curve: &SplineCurve, count: usize) -> Result<Vec<Point2>> {
    if count < 2 {
        return Err(Error::Argument(format!(
            "sampling needs at least 2 points, got {count}"
        )));
    }
    let (a, b) = curve.domain();
    let steps = (count - 1) as f64;
    (0..count)
        .map(|i| {
            let s = i as f64 / steps;
            let t = (a * (1.0 - s) + b * s).clamp(a, b);
            eval_bform(curve, t)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::KnotVector;

    fn space(d: usize, knots: &[f64]) -> SplineSpace {
        SplineSpace::new(d, KnotVector::new(knots.to_vec()).unwrap()).unwrap()
    }

    fn curve(d: usize, knots: &[f64], control: &[(f64, f64)]) -> SplineCurve {
        let pts = control.iter().map(|&(x, y)| Point2::new(x, y)).collect();
        SplineCurve::new(space(d, knots), pts).unwrap()
    }

    #[test]
    fn find_span_unique_interval() {
        let s = space(1, &[0.0, 0.0, 1.0, 2.0, 2.0]);
        assert_eq!(find_span(&s, 0.5).unwrap(), 1); // [0, 1)
    }

    #[test]
    fn find_span_right_closed_endpoint() {
        let s = space(1, &[0.0, 0.0, 1.0, 2.0, 2.0]);
        assert_eq!(find_span(&s, 2.0).unwrap(), 2); // closes [1, 2]
    }

    #[test]
    fn find_span_interior_knot() {
        let s = space(2, &[0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0]);
        assert_eq!(find_span(&s, 0.5).unwrap(), 3); // [0.5, 1)
    }

    #[test]
    fn find_span_rejects_out_of_domain() {
        let s = space(1, &[0.0, 0.0, 1.0, 2.0, 2.0]);
        let err = find_span(&s, 2.5).unwrap_err();
        match err {
            Error::OutOfDomain { start, end, .. } => {
                assert_eq!((start, end), (0.0, 2.0));
            }
            other => panic!("expected OutOfDomain, got {other:?}"),
        }
        assert!(find_span(&s, -0.1).is_err());
        assert!(find_span(&s, f64::NAN).is_err());
    }

    #[test]
    fn basis_degree_zero_indicator() {
        let s = space(0, &[0.0, 1.0]);
        assert_eq!(basis_value(&s, 0, 0, 0.5).unwrap(), 1.0);
        assert_eq!(basis_value(&s, 0, 0, 1.5).unwrap(), 0.0);
    }

    #[test]
    fn basis_hat_rising_edge() {
        // j=1, knots [0,1,2]: (t - 0) / (1 - 0) on the first leg. The
        // space's nominal degree is irrelevant to the recursion itself.
        let s = space(0, &[0.0, 1.0, 2.0]);
        assert_eq!(basis_value(&s, 0, 1, 0.5).unwrap(), 0.5);
    }

    #[test]
    fn basis_clamped_end_is_one() {
        // j=2, knots [0,0,0,1]: expanding the recursion with the
        // zero-division rule gives 1 at the clamped end.
        let s = space(1, &[0.0, 0.0, 0.0, 1.0]);
        assert_eq!(basis_value(&s, 0, 2, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn basis_value_index_out_of_range() {
        let s = space(1, &[0.0, 0.0, 1.0, 1.0]);
        assert!(basis_value(&s, 3, 1, 0.5).is_err());
        assert!(basis_value(&s, 0, 4, 0.5).is_err());
    }

    #[test]
    fn basis_row_linear_hats() {
        let s = space(1, &[0.0, 0.0, 1.0, 1.0]);
        let row = basis_row(&s, 0.5).unwrap();
        assert_eq!(row.values, vec![0.5, 0.5]);
    }

    #[test]
    fn basis_row_clamped_left_end() {
        let s = space(2, &[0.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let row = basis_row(&s, 0.0).unwrap();
        assert_eq!(row.values, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn basis_row_matches_basis_value() {
        let s = space(2, &[0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0]);
        for &t in &[0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0] {
            let row = basis_row(&s, t).unwrap();
            let first = row.first_index();
            let sum: f64 = row.values.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12, "sum {sum} at t={t}");
            for (j, &v) in row.values.iter().enumerate() {
                assert!((0.0..=1.0 + 1e-15).contains(&v), "value {v} at t={t}");
                let direct = basis_value(&s, first + j, 2, t).unwrap();
                assert!(
                    (v - direct).abs() < 1e-14,
                    "row {v} vs direct {direct} for i={} t={t}",
                    first + j
                );
            }
        }
    }

    #[test]
    fn bform_clamped_left_end_interpolates_first_control() {
        let c = curve(
            2,
            &[0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0],
            &[(3.0, -1.0), (4.0, 2.0), (0.0, 0.0), (7.0, 7.0)],
        );
        let p = eval_bform(&c, 0.0).unwrap();
        assert_eq!((p.x, p.y), (3.0, -1.0));
    }

    #[test]
    fn bform_line_segment_midpoint() {
        let c = curve(1, &[0.0, 0.0, 1.0, 1.0], &[(0.0, 0.0), (2.0, 2.0)]);
        let p = eval_bform(&c, 0.5).unwrap();
        assert_eq!((p.x, p.y), (1.0, 1.0));
    }

    #[test]
    fn deboor_degree_zero_returns_span_control() {
        let c = curve(0, &[0.0, 1.0, 2.0, 3.0], &[(1.0, 1.0), (2.0, 4.0), (3.0, 9.0)]);
        assert_eq!(eval_deboor(&c, 0.5).unwrap(), Point2::new(1.0, 1.0));
        assert_eq!(eval_deboor(&c, 1.5).unwrap(), Point2::new(2.0, 4.0));
        assert_eq!(eval_deboor(&c, 3.0).unwrap(), Point2::new(3.0, 9.0));
    }

    #[test]
    fn deboor_quadratic_bezier_midpoint() {
        // Bernstein weights at 1/2 are (1/4, 1/2, 1/4).
        let c = curve(
            2,
            &[0.0, 0.0, 0.0, 1.0, 1.0, 1.0],
            &[(0.0, 0.0), (1.0, 2.0), (2.0, 0.0)],
        );
        let p = eval_deboor(&c, 0.5).unwrap();
        assert!((p.x - 1.0).abs() < 1e-15 && (p.y - 1.0).abs() < 1e-15);
    }

    #[test]
    fn deboor_matches_bform_on_random_curve() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        // n=6, d=3: clamped with two interior knots.
        let knots = [0.0, 0.0, 0.0, 0.0, 0.4, 0.7, 1.0, 1.0, 1.0, 1.0];
        let control: Vec<(f64, f64)> = (0..6)
            .map(|_| (rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)))
            .collect();
        let c = curve(3, &knots, &control);
        for _ in 0..100 {
            let t: f64 = rng.random_range(0.0..=1.0);
            let a = eval_deboor(&c, t).unwrap();
            let b = eval_bform(&c, t).unwrap();
            assert!(
                (a.x - b.x).abs() < 1e-12 && (a.y - b.y).abs() < 1e-12,
                "mismatch at t={t}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn sample_curve_endpoints_only() {
        let c = curve(1, &[0.0, 0.0, 1.0, 1.0], &[(0.0, 0.0), (2.0, 2.0)]);
        let pts = sample_curve(&c, 2).unwrap();
        assert_eq!(pts, vec![Point2::new(0.0, 0.0), Point2::new(2.0, 2.0)]);
    }

    #[test]
    fn sample_curve_line_is_collinear() {
        let c = curve(1, &[0.0, 0.0, 1.0, 1.0], &[(0.0, 0.0), (4.0, 2.0)]);
        let pts = sample_curve(&c, 5).unwrap();
        assert_eq!(pts.len(), 5);
        for p in &pts {
            // On the segment y = x / 2.
            assert!((p.y - p.x / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn sample_curve_stays_in_control_bounding_box() {
        let control = [(0.0, 0.0), (1.0, 5.0), (4.0, -2.0), (6.0, 3.0), (2.0, 2.0), (5.0, 5.0)];
        let knots = [0.0, 0.0, 0.0, 0.0, 0.4, 0.7, 1.0, 1.0, 1.0, 1.0];
        let c = curve(3, &knots, &control);
        let (xs, ys): (Vec<f64>, Vec<f64>) = control.iter().copied().unzip();
        let (xmin, xmax) = (xs.iter().fold(f64::MAX, |a, &b| a.min(b)), xs.iter().fold(f64::MIN, |a, &b| a.max(b)));
        let (ymin, ymax) = (ys.iter().fold(f64::MAX, |a, &b| a.min(b)), ys.iter().fold(f64::MIN, |a, &b| a.max(b)));
        for p in sample_curve(&c, 1000).unwrap() {
            assert!(p.x >= xmin - 1e-12 && p.x <= xmax + 1e-12);
            assert!(p.y >= ymin - 1e-12 && p.y <= ymax + 1e-12);
        }
    }

    #[test]
    fn sample_curve_rejects_count_below_two() {
        let c = curve(1, &[0.0, 0.0, 1.0, 1.0], &[(0.0, 0.0), (2.0, 2.0)]);
        assert!(sample_curve(&c, 1).is_err());
        assert!(sample_curve(&c, 0).is_err());
    }

    #[test]
    fn degree_one_clamped_interpolates_interior_knots() {
        let c = curve(
            1,
            &[0.0, 0.0, 0.3, 0.6, 1.0, 1.0],
            &[(0.0, 1.0), (2.0, 3.0), (4.0, -1.0), (6.0, 0.0)],
        );
        // Hat function i peaks with value 1 at knots[i + 1].
        let p = eval_bform(&c, 0.3).unwrap();
        assert!(p.distance(Point2::new(2.0, 3.0)) < 1e-14);
        let q = eval_bform(&c, 0.6).unwrap();
        assert!(q.distance(Point2::new(4.0, -1.0)) < 1e-14);
    }
}
