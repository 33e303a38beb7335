//! Scalable vector graphic output: the original contour points as light
//! markers with the sampled spline curve overlaid as a single polyline.
//!
//! Data arrives in raster orientation (y down); for display the emitter
//! mirrors y within the data bounding box so the shape reads upright.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::sample_curve;
use crate::geometry::{Point2, SplineCurve};

/// Number of curve samples in the emitted polyline.
pub const PLOT_SAMPLES: usize = 1000;

/// Fraction of the data extent added as margin around the view box.
const MARGIN: f64 = 0.05;

/// Render contour points and fitted curve into an SVG string.
pub fn render_plot(curve: &SplineCurve, contour: &[Point2]) -> Result<String> {
    let samples = sample_curve(curve, PLOT_SAMPLES)?;
    if contour.is_empty() {
        return Err(Error::Argument("cannot plot an empty contour".into()));
    }

    let mut min = Point2::new(f64::INFINITY, f64::INFINITY);
    let mut max = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in contour.iter().chain(&samples) {
        min = Point2::new(min.x.min(p.x), min.y.min(p.y));
        max = Point2::new(max.x.max(p.x), max.y.max(p.y));
    }
    let extent = (max.x - min.x).max(max.y - min.y).max(1.0);
    let margin = MARGIN * extent;
    // Mirror y inside the bounding box: display orientation without
    // moving the view box.
    let flip = |p: &Point2| Point2::new(p.x, min.y + max.y - p.y);

    let view = format!(
        "{} {} {} {}",
        fmt(min.x - margin),
        fmt(min.y - margin),
        fmt(max.x - min.x + 2.0 * margin),
        fmt(max.y - min.y + 2.0 * margin)
    );
    let marker_r = 0.004 * extent;
    let stroke_w = 0.003 * extent;

    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{view}\">\n"
    ));
    svg.push_str("<g fill=\"#bfbfbf\" stroke=\"none\">\n");
    for p in contour {
        let q = flip(p);
        svg.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\"/>\n",
            fmt(q.x),
            fmt(q.y),
            fmt(marker_r)
        ));
    }
    svg.push_str("</g>\n");
    svg.push_str(&format!(
        "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"{}\" points=\"",
        fmt(stroke_w)
    ));
    for (i, p) in samples.iter().enumerate() {
        let q = flip(p);
        if i > 0 {
            svg.push(' ');
        }
        svg.push_str(&format!("{},{}", fmt(q.x), fmt(q.y)));
    }
    svg.push_str("\"/>\n</svg>\n");
    Ok(svg)
}

/// Write the plot next to the other outputs.
pub fn emit_plot(curve: &SplineCurve, contour: &[Point2], path: impl AsRef<Path>) -> Result<()> {
    let svg = render_plot(curve, contour)?;
    fs::write(path.as_ref(), svg)?;
    Ok(())
}

/// Shortest decimal representation that round-trips the value.
fn fmt(v: f64) -> String {
    format!("{v}")
}

/// Extract the polyline vertices back out of an emitted plot, undoing the
/// y mirror with the supplied bounding interval. Intended for tests and
/// round-trip checks.
pub fn parse_polyline(svg: &str, y_min: f64, y_max: f64) -> Result<Vec<Point2>> {
    let start = svg
        .find("points=\"")
        .ok_or_else(|| Error::Argument("no polyline points in svg".into()))?
        + "points=\"".len();
    let end = svg[start..]
        .find('"')
        .ok_or_else(|| Error::Argument("unterminated points attribute".into()))?
        + start;
    svg[start..end]
        .split_whitespace()
        .map(|pair| {
            let (x, y) = pair
                .split_once(',')
                .ok_or_else(|| Error::Argument(format!("bad vertex '{pair}'")))?;
            let px: f64 = x
                .parse()
                .map_err(|_| Error::Argument(format!("bad coordinate '{x}'")))?;
            let py: f64 = y
                .parse()
                .map_err(|_| Error::Argument(format!("bad coordinate '{y}'")))?;
            Ok(Point2::new(px, y_min + y_max - py))
        })
        .collect()
}
