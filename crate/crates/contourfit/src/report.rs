//! Fit output files: a key-value report and a coefficient file holding
//! the control points and the knot vector. Numeric fields use the
//! shortest decimal form that round-trips, so repeated runs on identical
//! input are byte-identical (the timing field aside) and the curve can be
//! reconstructed exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{FitReport, KnotVector, ParamMethod, Point2, SplineCurve, SplineSpace};

/// Render the report as `key=value` lines.
pub fn render_report(report: &FitReport) -> String {
    let mut out = String::new();
    let curve = &report.curve;
    let _ = writeln!(out, "n={}", curve.space().dimension());
    let _ = writeln!(out, "d={}", curve.degree());
    let _ = writeln!(out, "method={}", report.params_method.label());
    let _ = writeln!(out, "m={}", report.n_points);
    let _ = writeln!(out, "lse={}", report.lse);
    let _ = writeln!(out, "residual_orthogonality={}", report.residual_orthogonality);
    let _ = writeln!(out, "wall_time_ms={}", report.wall_time.as_secs_f64() * 1e3);
    out
}

/// Write `<prefix>.report.txt`.
pub fn emit_report(report: &FitReport, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path.as_ref(), render_report(report))?;
    Ok(())
}

/// Parsed form of an emitted report.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedReport {
    pub n: usize,
    pub d: usize,
    pub method: ParamMethod,
    pub m: usize,
    pub lse: f64,
    pub residual_orthogonality: f64,
    pub wall_time_ms: f64,
}

/// Parse a report produced by `render_report`.
pub fn parse_report(text: &str) -> Result<ParsedReport> {
    let mut n = None;
    let mut d = None;
    let mut method = None;
    let mut m = None;
    let mut lse = None;
    let mut orth = None;
    let mut wall = None;
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Argument(format!(
            "report line {} has no '=': '{line}'",
            idx + 1
        )))?;
        match key {
            "n" => n = Some(parse_num::<usize>(key, value)?),
            "d" => d = Some(parse_num::<usize>(key, value)?),
            "method" => method = Some(ParamMethod::from_label(value)?),
            "m" => m = Some(parse_num::<usize>(key, value)?),
            "lse" => lse = Some(parse_num::<f64>(key, value)?),
            "residual_orthogonality" => orth = Some(parse_num::<f64>(key, value)?),
            "wall_time_ms" => wall = Some(parse_num::<f64>(key, value)?),
            other => {
                return Err(Error::Argument(format!("unknown report key '{other}'")));
            }
        }
    }
    Ok(ParsedReport {
        n: n.ok_or_else(|| missing("n"))?,
        d: d.ok_or_else(|| missing("d"))?,
        method: method.ok_or_else(|| missing("method"))?,
        m: m.ok_or_else(|| missing("m"))?,
        lse: lse.ok_or_else(|| missing("lse"))?,
        residual_orthogonality: orth.ok_or_else(|| missing("residual_orthogonality"))?,
        wall_time_ms: wall.ok_or_else(|| missing("wall_time_ms"))?,
    })
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Argument(format!("bad value '{value}' for report key '{key}'")))
}

fn missing(key: &str) -> Error {
    Error::Argument(format!("report is missing key '{key}'"))
}

/// Render the coefficient file: a `cx,cy` header, one control point per
/// line, then a `knots` sentinel and one knot per line. Degree is
/// recoverable as `knot count - n - 1`.
pub fn render_coefficients(curve: &SplineCurve) -> String {
    let mut out = String::from("cx,cy\n");
    for p in curve.control() {
        let _ = writeln!(out, "{},{}", p.x, p.y);
    }
    out.push_str("knots\n");
    for k in curve.space().knots().as_slice() {
        let _ = writeln!(out, "{k}");
    }
    out
}

/// Write `<prefix>.coef.csv`.
pub fn emit_coefficients(curve: &SplineCurve, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path.as_ref(), render_coefficients(curve))?;
    Ok(())
}

/// Rebuild the fitted curve from an emitted coefficient file.
pub fn parse_coefficients(text: &str) -> Result<SplineCurve> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "cx,cy" => {}
        _ => {
            return Err(Error::Argument(
                "coefficient file must start with 'cx,cy'".into(),
            ))
        }
    }
    let mut control = Vec::new();
    let mut knots = Vec::new();
    let mut in_knots = false;
    for (idx, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "knots" {
            in_knots = true;
            continue;
        }
        if in_knots {
            let k: f64 = line.parse().map_err(|_| {
                Error::Argument(format!("bad knot '{line}' at line {}", idx + 1))
            })?;
            knots.push(k);
        } else {
            let (x, y) = line.split_once(',').ok_or_else(|| {
                Error::Argument(format!("bad control point '{line}' at line {}", idx + 1))
            })?;
            let px: f64 = x.trim().parse().map_err(|_| {
                Error::Argument(format!("bad coordinate '{x}' at line {}", idx + 1))
            })?;
            let py: f64 = y.trim().parse().map_err(|_| {
                Error::Argument(format!("bad coordinate '{y}' at line {}", idx + 1))
            })?;
            control.push(Point2::new(px, py));
        }
    }
    let n = control.len();
    if knots.len() <= n + 1 {
        return Err(Error::Argument(format!(
            "knot count {} inconsistent with {} control points",
            knots.len(),
            n
        )));
    }
    let degree = knots.len() - n - 1;
    let space = SplineSpace::new(degree, KnotVector::new(knots)?)?;
    SplineCurve::new(space, control)
}

/// Load a coefficient file from disk.
pub fn load_coefficients(path: impl AsRef<Path>) -> Result<SplineCurve> {
    let text = fs::read_to_string(path.as_ref())?;
    parse_coefficients(&text)
}
