//! Least-squares spline fitting.
//!
//! The collocation matrix holds the `d + 1` nonzero basis values per data
//! parameter, so the normal matrix `B^t B` is symmetric banded with
//! bandwidth `d`. The primary solver is a banded Cholesky factorization of
//! the normal system; when the 1-norm condition estimate of `B^t B`
//! exceeds `COND_FALLBACK_LIMIT`, or its factorization breaks down, the
//! solve falls back to Householder QR on the full matrix.
//!
//! Every solve verifies residual orthogonality `||B^t (y - Bc)||` before
//! returning, and fit drivers recompute the least-square error by
//! re-evaluating the curve rather than trusting solver internals.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::eval::{basis_row, eval_bform};
use crate::geometry::{
    FitReport, ParamMethod, ParameterVector, Point2, SplineCurve, SplineSpace, SpaceViolation,
};
use crate::parametrize::{knots_from_params, parameters};

/// Condition-estimate threshold beyond which the normal-equation path is
/// abandoned for the orthogonal factorization.
pub const COND_FALLBACK_LIMIT: f64 = 1e12;

/// Relative and absolute residual-orthogonality tolerances guaranteed by
/// every successful solve: `||B^t r|| <= REL * ||B^t y|| + ABS`.
pub const ORTHOGONALITY_REL: f64 = 1e-8;
pub const ORTHOGONALITY_ABS: f64 = 1e-12;

/// B-spline collocation matrix in banded storage: row `k` holds the
/// `d + 1` contiguous nonzero entries starting at column `first[k]`.
#[derive(Debug, Clone)]
pub struct CollocationMatrix {
    m: usize,
    n: usize,
    degree: usize,
    first: Vec<usize>,
    band: Vec<f64>,
}

impl CollocationMatrix {
    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.degree + 1
    }

    /// Dense entry `B[k][i]` (zero outside the band).
    pub fn entry(&self, k: usize, i: usize) -> f64 {
        let first = self.first[k];
        if i < first || i > first + self.degree {
            0.0
        } else {
            self.band[k * (self.degree + 1) + (i - first)]
        }
    }

    /// `B c` for a coefficient vector of length `n`.
    pub fn matvec(&self, c: &[f64]) -> Vec<f64> {
        assert_eq!(c.len(), self.n);
        let w = self.degree + 1;
        (0..self.m)
            .map(|k| {
                let first = self.first[k];
                self.band[k * w..(k + 1) * w]
                    .iter()
                    .enumerate()
                    .map(|(j, &b)| b * c[first + j])
                    .sum()
            })
            .collect()
    }

    /// `B^t r` for a residual vector of length `m`.
    pub fn tr_matvec(&self, r: &[f64]) -> Vec<f64> {
        assert_eq!(r.len(), self.m);
        let w = self.degree + 1;
        let mut g = vec![0.0; self.n];
        for (k, &rk) in r.iter().enumerate() {
            let first = self.first[k];
            for j in 0..w {
                g[first + j] += self.band[k * w + j] * rk;
            }
        }
        g
    }

    /// Basis indices whose column is entirely zero: no data parameter
    /// lies in their support.
    pub fn empty_support_columns(&self) -> Vec<usize> {
        let w = self.degree + 1;
        let mut seen = vec![false; self.n];
        for k in 0..self.m {
            for j in 0..w {
                if self.band[k * w + j] != 0.0 {
                    seen[self.first[k] + j] = true;
                }
            }
        }
        (0..self.n).filter(|&i| !seen[i]).collect()
    }

    fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.m * self.n];
        let w = self.degree + 1;
        for k in 0..self.m {
            for j in 0..w {
                dense[k * self.n + self.first[k] + j] = self.band[k * w + j];
            }
        }
        dense
    }
}

/// Assemble the collocation matrix `B[k][i] = B_{i,d}(t_k)` for data
/// parameters `ts`, all of which must lie in the evaluation domain.
pub fn collocation_matrix(space: &SplineSpace, ts: &[f64]) -> Result<CollocationMatrix> {
    let d = space.degree();
    let n = space.dimension();
    let m = ts.len();
    let mut first = Vec::with_capacity(m);
    let mut band = Vec::with_capacity(m * (d + 1));
    for (k, &t) in ts.iter().enumerate() {
        let row = basis_row(space, t).map_err(|e| match e {
            Error::OutOfDomain { value, start, end } => Error::ParamOutOfDomain {
                index: k,
                value,
                start,
                end,
            },
            other => other,
        })?;
        first.push(row.first_index());
        band.extend_from_slice(&row.values);
    }
    Ok(CollocationMatrix {
        m,
        n,
        degree: d,
        first,
        band,
    })
}

/// Symmetric positive-definite band matrix stored by lower diagonals:
/// `data[j * bw + r] = A[j + r][j]` for `r = 0..bw`.
#[derive(Debug, Clone)]
struct BandedSym {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandedSym {
    fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i >= j && i - j < self.bw);
        self.data[j * self.bw + (i - j)]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.bw + (i - j)] = v;
    }

    /// Max column absolute sum, using symmetry for the upper triangle.
    fn norm1(&self) -> f64 {
        let mut sums = vec![0.0; self.n];
        for j in 0..self.n {
            for r in 0..self.bw.min(self.n - j) {
                let v = self.data[j * self.bw + r].abs();
                sums[j] += v;
                if r > 0 {
                    sums[j + r] += v;
                }
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }
}

/// `B^t B` assembled over the band: O(m d^2).
fn normal_matrix(b: &CollocationMatrix) -> BandedSym {
    let bw = b.degree + 1;
    let mut a = BandedSym {
        n: b.n,
        bw,
        data: vec![0.0; b.n * bw],
    };
    for k in 0..b.m {
        let first = b.first[k];
        let row = &b.band[k * bw..(k + 1) * bw];
        for p in 0..bw {
            for q in p..bw {
                a.data[(first + p) * bw + (q - p)] += row[p] * row[q];
            }
        }
    }
    a
}

/// Banded Cholesky `A = L L^t`; fails with the column index of the first
/// nonpositive pivot.
fn cholesky_banded(a: &BandedSym) -> std::result::Result<BandedSym, usize> {
    let mut l = a.clone();
    let n = l.n;
    let bw = l.bw;
    for j in 0..n {
        let kstart = j.saturating_sub(bw - 1);
        let mut pivot = l.get(j, j);
        for k in kstart..j {
            let x = l.get(j, k);
            pivot -= x * x;
        }
        if pivot <= 0.0 || !pivot.is_finite() {
            return Err(j);
        }
        let diag = pivot.sqrt();
        l.set(j, j, diag);
        for r in 1..bw {
            let i = j + r;
            if i >= n {
                break;
            }
            let mut sum = l.get(i, j);
            for k in i.saturating_sub(bw - 1)..j {
                sum -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, sum / diag);
        }
    }
    Ok(l)
}

/// Count positive pivots when factoring with skipped nonpositive pivots;
/// a rank estimate for the deficiency report.
fn cholesky_rank_estimate(a: &BandedSym) -> usize {
    let mut l = a.clone();
    let n = l.n;
    let bw = l.bw;
    let tol = a.norm1() * f64::EPSILON * n as f64;
    let mut rank = 0;
    for j in 0..n {
        let mut pivot = l.get(j, j);
        for k in j.saturating_sub(bw - 1)..j {
            let x = l.get(j, k);
            pivot -= x * x;
        }
        if pivot > tol && pivot.is_finite() {
            rank += 1;
            let diag = pivot.sqrt();
            l.set(j, j, diag);
            for r in 1..bw {
                let i = j + r;
                if i >= n {
                    break;
                }
                let mut sum = l.get(i, j);
                for k in i.saturating_sub(bw - 1)..j {
                    sum -= l.get(i, k) * l.get(j, k);
                }
                l.set(i, j, sum / diag);
            }
        } else {
            l.set(j, j, 0.0);
            for r in 1..bw {
                let i = j + r;
                if i >= n {
                    break;
                }
                l.set(i, j, 0.0);
            }
        }
    }
    rank
}

/// Solve `L L^t c = g` by forward and back substitution over the band.
#[allow(clippy::needless_range_loop)]
fn solve_cholesky(l: &BandedSym, g: &[f64]) -> Vec<f64> {
    let n = l.n;
    let bw = l.bw;
    let mut z = vec![0.0; n];
    for j in 0..n {
        let mut acc = g[j];
        for k in j.saturating_sub(bw - 1)..j {
            acc -= l.get(j, k) * z[k];
        }
        z[j] = acc / l.get(j, j);
    }
    let mut c = vec![0.0; n];
    for j in (0..n).rev() {
        let mut acc = z[j];
        for i in j + 1..n.min(j + bw) {
            acc -= l.get(i, j) * c[i];
        }
        c[j] = acc / l.get(j, j);
    }
    c
}

/// Hager-style 1-norm estimate of `A^{-1}` using the factorization.
fn inv_norm1_estimate(l: &BandedSym) -> f64 {
    let n = l.n;
    let mut x = vec![1.0 / n as f64; n];
    let mut estimate = 0.0f64;
    for _ in 0..5 {
        let y = solve_cholesky(l, &x);
        let y_norm1: f64 = y.iter().map(|v| v.abs()).sum();
        estimate = estimate.max(y_norm1);
        let sign: Vec<f64> = y.iter().map(|v| if *v >= 0.0 { 1.0 } else { -1.0 }).collect();
        let z = solve_cholesky(l, &sign);
        let (jmax, zmax) = z
            .iter()
            .map(|v| v.abs())
            .enumerate()
            .fold((0, 0.0), |acc, (j, v)| if v > acc.1 { (j, v) } else { acc });
        let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
        if zmax <= ztx {
            break;
        }
        x = vec![0.0; n];
        x[jmax] = 1.0;
    }
    estimate
}

/// Householder QR least squares on the dense matrix; used as the
/// numerical-safety fallback. Returns one solution per right-hand side.
#[allow(clippy::needless_range_loop)]
fn qr_least_squares(
    b: &CollocationMatrix,
    rhs: &[&[f64]],
) -> std::result::Result<Vec<Vec<f64>>, usize> {
    let m = b.m;
    let n = b.n;
    let mut a = b.to_dense();
    let mut ys: Vec<Vec<f64>> = rhs.iter().map(|y| y.to_vec()).collect();
    let mut diag = vec![0.0; n];
    for k in 0..n {
        let norm = (k..m).map(|i| a[i * n + k] * a[i * n + k]).sum::<f64>().sqrt();
        if norm == 0.0 {
            diag[k] = 0.0;
            continue;
        }
        let alpha = if a[k * n + k] > 0.0 { -norm } else { norm };
        // Householder vector overwrites the pivot column.
        a[k * n + k] -= alpha;
        let vtv: f64 = (k..m).map(|i| a[i * n + k] * a[i * n + k]).sum();
        for col in k + 1..n {
            let dot: f64 = (k..m).map(|i| a[i * n + k] * a[i * n + col]).sum();
            let scale = 2.0 * dot / vtv;
            for i in k..m {
                a[i * n + col] -= scale * a[i * n + k];
            }
        }
        for y in ys.iter_mut() {
            let dot: f64 = (k..m).map(|i| a[i * n + k] * y[i]).sum();
            let scale = 2.0 * dot / vtv;
            for i in k..m {
                y[i] -= scale * a[i * n + k];
            }
        }
        diag[k] = alpha;
    }
    let max_diag = diag.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let tol = max_diag * f64::EPSILON * (m.max(n) as f64);
    if let Some(bad) = (0..n).find(|&k| diag[k].abs() <= tol) {
        let rank = (0..n).filter(|&k| diag[k].abs() > tol).count();
        let _ = bad;
        return Err(rank);
    }
    let mut solutions = Vec::with_capacity(ys.len());
    for y in &ys {
        let mut c = vec![0.0; n];
        for k in (0..n).rev() {
            let mut acc = y[k];
            for j in k + 1..n {
                acc -= upper_entry(&a, &diag, n, k, j) * c[j];
            }
            c[k] = acc / diag[k];
        }
        solutions.push(c);
    }
    Ok(solutions)
}

/// Entry of R after the factorization (diagonal kept separately).
fn upper_entry(a: &[f64], diag: &[f64], n: usize, i: usize, j: usize) -> f64 {
    debug_assert!(i <= j);
    if i == j {
        diag[i]
    } else {
        a[i * n + j]
    }
}

/// Diagnostics attached to a successful normal-system solve.
#[derive(Debug, Clone)]
pub struct SolveDiagnostics {
    /// 1-norm condition estimate of `B^t B` (infinite when the
    /// factorization broke down and the QR fallback carried the solve).
    pub condition_estimate: f64,
    pub used_qr_fallback: bool,
    /// `||B^t (y - Bc)||_2` per right-hand side.
    pub orthogonality: Vec<f64>,
}

/// Solve the normal system `B^t B c = B^t y` for several right-hand
/// sides sharing one factorization.
pub fn solve_normal_multi(
    b: &CollocationMatrix,
    rhs: &[&[f64]],
) -> Result<(Vec<Vec<f64>>, SolveDiagnostics)> {
    for (idx, y) in rhs.iter().enumerate() {
        if y.len() != b.m {
            return Err(Error::Argument(format!(
                "right-hand side #{idx} has length {}, expected {}",
                y.len(),
                b.m
            )));
        }
    }
    let a = normal_matrix(b);
    let mut used_qr = false;
    let mut condition = f64::INFINITY;
    let solutions = match cholesky_banded(&a) {
        Ok(l) => {
            condition = a.norm1() * inv_norm1_estimate(&l);
            if condition > COND_FALLBACK_LIMIT {
                used_qr = true;
                run_qr(b, rhs, &a)?
            } else {
                rhs.iter()
                    .map(|y| solve_cholesky(&l, &b.tr_matvec(y)))
                    .collect()
            }
        }
        Err(_) => {
            used_qr = true;
            run_qr(b, rhs, &a)?
        }
    };
    let mut orthogonality = Vec::with_capacity(rhs.len());
    for (y, c) in rhs.iter().zip(&solutions) {
        let fitted = b.matvec(c);
        let residual: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
        let g = b.tr_matvec(&residual);
        let g_norm = norm2(&g);
        let gy_norm = norm2(&b.tr_matvec(y));
        // Negated form also trips on NaN residuals.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(g_norm <= ORTHOGONALITY_REL * gy_norm + ORTHOGONALITY_ABS) {
            return Err(Error::Numerical(format!(
                "residual orthogonality {g_norm:e} exceeds {:e} (||B^t y|| = {gy_norm:e})",
                ORTHOGONALITY_REL * gy_norm + ORTHOGONALITY_ABS
            )));
        }
        orthogonality.push(g_norm);
    }
    Ok((
        solutions,
        SolveDiagnostics {
            condition_estimate: condition,
            used_qr_fallback: used_qr,
            orthogonality,
        },
    ))
}

fn run_qr(
    b: &CollocationMatrix,
    rhs: &[&[f64]],
    a: &BandedSym,
) -> Result<Vec<Vec<f64>>> {
    qr_least_squares(b, rhs).map_err(|rank| Error::RankDeficient {
        estimated_rank: rank.min(cholesky_rank_estimate(a)),
        dimension: b.n,
        empty_support: b.empty_support_columns(),
    })
}

/// Solve the normal system for a single right-hand side.
pub fn solve_normal(b: &CollocationMatrix, y: &[f64]) -> Result<Vec<f64>> {
    let (mut solutions, _) = solve_normal_multi(b, &[y])?;
    Ok(solutions.pop().unwrap())
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Scalar least-squares fit result.
#[derive(Debug, Clone)]
pub struct ScalarFit {
    pub coefficients: Vec<f64>,
    /// Sum of squared residuals recomputed by re-substitution.
    pub lse: f64,
}

/// Fit a spline function to scalar data `(x_k, y_k)` over a given space.
pub fn fit_scalar(space: &SplineSpace, data: &[(f64, f64)]) -> Result<ScalarFit> {
    let m = data.len();
    let n = space.dimension();
    if m <= n {
        return Err(Error::Argument(format!(
            "need more data points than basis functions (m > n), got m = {m}, n = {n}"
        )));
    }
    require_lsq_valid(space)?;
    let xs: Vec<f64> = data.iter().map(|d| d.0).collect();
    let ys: Vec<f64> = data.iter().map(|d| d.1).collect();
    let b = collocation_matrix(space, &xs)?;
    let c = solve_normal(&b, &ys)?;
    let fitted = b.matvec(&c);
    let lse = ys
        .iter()
        .zip(&fitted)
        .map(|(y, f)| (y - f) * (y - f))
        .sum();
    Ok(ScalarFit {
        coefficients: c,
        lse,
    })
}

fn require_lsq_valid(space: &SplineSpace) -> Result<()> {
    let validity = space.validate();
    if let Some(v) = validity.violations.first() {
        return match v {
            SpaceViolation::GapTooSmall { index } => Err(Error::FitInfeasible { index: *index }),
            other => Err(Error::Argument(format!("invalid spline space: {other}"))),
        };
    }
    Ok(())
}

/// Fit a parametric plane curve to an ordered point sequence: assign
/// parameters by `method`, build the knot vector, assemble one
/// collocation matrix and solve both coordinate systems on a shared
/// factorization.
pub fn fit_parametric_curve(
    points: &[Point2],
    n: usize,
    d: usize,
    method: ParamMethod,
) -> Result<FitReport> {
    let started = Instant::now();
    let m = points.len();
    if let Some(i) = points.iter().position(|p| !p.is_finite()) {
        return Err(Error::Argument(format!("input point #{i} is not finite")));
    }
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
    let params = parameters(method, points)?;
    let knots = knots_from_params(&params, n, d)?;
    let space = SplineSpace::new(d, knots)?;
    let b = collocation_matrix(&space, params.as_slice())?;
    let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.y).collect();
    let (solutions, diag) = solve_normal_multi(&b, &[&xs, &ys])?;
    let control: Vec<Point2> = solutions[0]
        .iter()
        .zip(&solutions[1])
        .map(|(&x, &y)| Point2::new(x, y))
        .collect();
    let curve = SplineCurve::new(space, control)?;
    let lse = curve_lse(&curve, points, &params)?;
    let residual_orthogonality =
        (diag.orthogonality[0].powi(2) + diag.orthogonality[1].powi(2)).sqrt();
    Ok(FitReport {
        curve,
        lse,
        residual_orthogonality,
        params_method: method,
        n_points: m,
        wall_time: started.elapsed(),
    })
}

/// Sum of squared distances between data points and the curve evaluated
/// at their parameters.
pub fn curve_lse(curve: &SplineCurve, points: &[Point2], params: &ParameterVector) -> Result<f64> {
    if points.len() != params.len() {
        return Err(Error::Argument(format!(
            "{} points but {} parameters",
            points.len(),
            params.len()
        )));
    }
    let mut lse = 0.0;
    for (p, &t) in points.iter().zip(params.as_slice()) {
        let f = eval_bform(curve, t)?;
        lse += (p.x - f.x) * (p.x - f.x) + (p.y - f.y) * (p.y - f.y);
    }
    Ok(lse)
}
