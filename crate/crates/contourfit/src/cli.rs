//! Command-line pipeline: contour acquisition (image or point list),
//! spline fit, and emission of coefficient file, report and plot.
//!
//! Exit codes: 0 success, 2 argument errors, 3 input or extraction
//! errors, 4 fit-infeasible or rank errors.

use std::path::{Path, PathBuf};

use clap::Parser;

use crate::contour::{binarize, load_image, load_points_csv, trace_boundary, Threshold};
use crate::error::{Error, Result};
use crate::fit::fit_parametric_curve;
use crate::geometry::{FitReport, ParamMethod, Point2};
use crate::plot::emit_plot;
use crate::report::{emit_coefficients, emit_report};

#[derive(Parser, Debug, Clone)]
#[command(
    name = "contourfit",
    about = "Approximate a plane contour by a least-squares spline curve",
    disable_help_subcommand = true
)]
pub struct Args {
    /// Input file: portable graymap (.pgm/.pnm) or point list (.csv),
    /// picked by extension.
    #[arg(long)]
    pub input: PathBuf,

    /// Number of polynomial patches (spline space dimension).
    #[arg(long)]
    pub n: usize,

    /// Polynomial degree.
    #[arg(long)]
    pub d: usize,

    /// Parametrization method: uniform, uniform-literal, chord or
    /// centripetal.
    #[arg(long, default_value = "chord", value_parser = parse_param)]
    pub param: ParamMethod,

    /// Binarization threshold for image input: AUTO or a value in 0..=255.
    #[arg(long, default_value = "AUTO", value_parser = parse_threshold)]
    pub threshold: Threshold,

    /// Prefix for output files; defaults to the input path without its
    /// extension.
    #[arg(long)]
    pub out_prefix: Option<PathBuf>,

    /// Emit the SVG plot: on or off.
    #[arg(long, default_value = "on", value_parser = parse_switch, action = clap::ArgAction::Set)]
    pub plot: bool,

    /// Duplicate the first contour point at the end so the fitted curve
    /// visually closes: on or off.
    #[arg(long, default_value = "on", value_parser = parse_switch, action = clap::ArgAction::Set)]
    pub close_contour: bool,
}

fn parse_param(s: &str) -> std::result::Result<ParamMethod, String> {
    ParamMethod::from_label(s).map_err(|e| e.to_string())
}

fn parse_threshold(s: &str) -> std::result::Result<Threshold, String> {
    if s == "AUTO" {
        return Ok(Threshold::Auto);
    }
    s.parse::<u8>()
        .map(Threshold::Fixed)
        .map_err(|_| format!("threshold must be AUTO or an integer in 0..=255, got '{s}'"))
}

fn parse_switch(s: &str) -> std::result::Result<bool, String> {
    match s {
        "on" => Ok(true),
        "off" => Ok(false),
        other => Err(format!("expected 'on' or 'off', got '{other}'")),
    }
}

/// Outputs written by a successful run.
#[derive(Debug)]
pub struct RunOutput {
    pub report: FitReport,
    pub coef_path: PathBuf,
    pub report_path: PathBuf,
    pub plot_path: Option<PathBuf>,
}

/// Execute the pipeline: extract, parametrize, fit, emit.
pub fn run_fit(args: &Args) -> Result<RunOutput> {
    let mut points = load_contour_points(&args.input, args.threshold)?;
    if args.close_contour && points.len() > 1 && points.first() != points.last() {
        points.push(points[0]);
    }
    let report = fit_parametric_curve(&points, args.n, args.d, args.param)?;

    let prefix = args
        .out_prefix
        .clone()
        .unwrap_or_else(|| args.input.with_extension(""));
    let coef_path = with_suffix(&prefix, ".coef.csv");
    let report_path = with_suffix(&prefix, ".report.txt");
    emit_coefficients(&report.curve, &coef_path)?;
    emit_report(&report, &report_path)?;
    let plot_path = if args.plot {
        let path = with_suffix(&prefix, ".svg");
        emit_plot(&report.curve, &points, &path)?;
        Some(path)
    } else {
        None
    };
    Ok(RunOutput {
        report,
        coef_path,
        report_path,
        plot_path,
    })
}

/// Run and map the outcome to a process exit code, printing a single
/// diagnostic line on the error stream when something fails.
pub fn run(args: &Args) -> i32 {
    match run_fit(args) {
        Ok(output) => {
            let r = &output.report;
            println!(
                "fit: m={} n={} d={} method={} lse={} wall_time_ms={}",
                r.n_points,
                r.curve.space().dimension(),
                r.curve.degree(),
                r.params_method.label(),
                r.lse,
                r.wall_time.as_secs_f64() * 1e3
            );
            println!("wrote {}", output.coef_path.display());
            println!("wrote {}", output.report_path.display());
            if let Some(p) = &output.plot_path {
                println!("wrote {}", p.display());
            }
            0
        }
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn load_contour_points(input: &Path, threshold: Threshold) -> Result<Vec<Point2>> {
    let ext = input
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .unwrap_or_default();
    match ext.as_str() {
        "pgm" | "pnm" => {
            let image = load_image(input)?;
            let binary = binarize(&image, threshold);
            let contour = trace_boundary(&binary)?;
            Ok(contour.points)
        }
        "csv" => Ok(load_points_csv(input)?.points),
        other => Err(Error::Argument(format!(
            "unsupported input extension '{other}' (expected pgm, pnm or csv)"
        ))),
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}
