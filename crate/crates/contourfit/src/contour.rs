//! Contour acquisition: grayscale image loading (portable graymap, ASCII
//! and binary), threshold binarization with an automatic between-class
//! variance threshold, boundary tracing of the largest foreground
//! component, and point-list loading from CSV.
//!
//! Image coordinates follow the raster convention, y growing downward.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Point2;

/// Row-major grayscale image with intensities in `0..=255`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<GrayImage> {
        if width == 0 || height == 0 {
            return Err(Error::Argument(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::Argument(format!(
                "pixel count {} does not match {width}x{height}",
                pixels.len()
            )));
        }
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    fn at(&self, x: i64, y: i64) -> u8 {
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            0
        } else {
            self.pixels[y as usize * self.width + x as usize]
        }
    }
}

/// Ordered sequence of contour points. When produced by tracing,
/// consecutive points are 8-neighbors and the sequence is closed.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub points: Vec<Point2>,
    pub closed: bool,
}

/// Threshold selection for `binarize`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threshold {
    /// Maximize between-class variance over the intensity histogram.
    Auto,
    /// Fixed cut: a pixel is foreground iff its intensity is strictly
    /// below this value.
    Fixed(u8),
}

/// Decode a portable graymap (magic `P2` or `P5`, max value <= 255) and
/// normalize intensities to `0..=255`.
pub fn load_image(path: impl AsRef<Path>) -> Result<GrayImage> {
    let bytes = fs::read(path.as_ref())?;
    decode_pgm(&bytes)
}

/// Decode PGM data from memory; errors carry the byte offset at which
/// parsing failed.
pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut cursor = PgmCursor { bytes, pos: 0 };
    let magic = cursor.take_magic()?;
    let width = cursor.take_number("width")?;
    let height = cursor.take_number("height")?;
    let maxval = cursor.take_number("max value")?;
    if width == 0 || height == 0 {
        return Err(cursor.error("image dimensions must be positive"));
    }
    if maxval == 0 || maxval > 255 {
        return Err(cursor.error(format!(
            "unsupported max value {maxval} (expected 1..=255)"
        )));
    }
    let count = width * height;
    let mut pixels = Vec::with_capacity(count);
    match magic {
        Magic::Ascii => {
            for _ in 0..count {
                let v = cursor.take_number("pixel")?;
                if v > maxval {
                    return Err(cursor.error(format!("pixel value {v} exceeds max value {maxval}")));
                }
                pixels.push(v);
            }
        }
        Magic::Binary => {
            // Exactly one whitespace byte separates the header from the raster.
            cursor.take_single_whitespace()?;
            if cursor.bytes.len() - cursor.pos < count {
                cursor.pos = cursor.bytes.len();
                return Err(cursor.error(format!(
                    "raster truncated: expected {count} bytes"
                )));
            }
            for _ in 0..count {
                let v = cursor.bytes[cursor.pos] as usize;
                cursor.pos += 1;
                if v > maxval {
                    return Err(cursor.error(format!("pixel value {v} exceeds max value {maxval}")));
                }
                pixels.push(v);
            }
        }
    }
    let scaled: Vec<u8> = if maxval == 255 {
        pixels.into_iter().map(|v| v as u8).collect()
    } else {
        pixels
            .into_iter()
            .map(|v| ((v * 255 + maxval / 2) / maxval) as u8)
            .collect()
    };
    GrayImage::new(width, height, scaled)
}

enum Magic {
    Ascii,
    Binary,
}

struct PgmCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> PgmCursor<'a> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::ImageParse {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn take_magic(&mut self) -> Result<Magic> {
        if self.bytes.len() < 2 {
            return Err(self.error("missing magic number"));
        }
        let magic = &self.bytes[..2];
        self.pos = 2;
        match magic {
            b"P2" => Ok(Magic::Ascii),
            b"P5" => Ok(Magic::Binary),
            _ => {
                self.pos = 0;
                Err(self.error("expected magic number P2 or P5"))
            }
        }
    }

    /// Skip whitespace and `#` comments.
    fn skip_separators(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b' ' | b'\t' | b'\r' | b'\n' | 0x0b | 0x0c => self.pos += 1,
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn take_number(&mut self, what: &str) -> Result<usize> {
        self.skip_separators();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error(format!("expected {what}")));
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        text.parse::<usize>()
            .map_err(|_| self.error(format!("{what} '{text}' out of range")))
    }

    fn take_single_whitespace(&mut self) -> Result<()> {
        if self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error("expected whitespace after max value"))
        }
    }
}

/// Threshold the image: a pixel becomes 1 (foreground, the dark
/// silhouette) iff its intensity is strictly below the threshold.
/// `Threshold::Auto` picks the cut maximizing between-class variance.
pub fn binarize(img: &GrayImage, threshold: Threshold) -> GrayImage {
    let cut = match threshold {
        Threshold::Fixed(v) => v as u32,
        Threshold::Auto => otsu_threshold(&img.pixels) as u32 + 1,
    };
    let pixels = img
        .pixels
        .iter()
        .map(|&p| u8::from((p as u32) < cut))
        .collect();
    GrayImage {
        width: img.width,
        height: img.height,
        pixels,
    }
}

/// Split level maximizing between-class variance: class 0 is `0..=t`,
/// class 1 is `t+1..=255`. Returns the first maximizer.
fn otsu_threshold(pixels: &[u8]) -> u8 {
    let mut hist = [0u64; 256];
    for &p in pixels {
        hist[p as usize] += 1;
    }
    let total = pixels.len() as f64;
    let sum_total: f64 = hist
        .iter()
        .enumerate()
        .map(|(v, &c)| v as f64 * c as f64)
        .sum();
    let mut w0 = 0.0;
    let mut sum0 = 0.0;
    let mut best = (0u8, -1.0);
    for (t, &count) in hist.iter().enumerate() {
        w0 += count as f64;
        if w0 == 0.0 {
            continue;
        }
        let w1 = total - w0;
        if w1 == 0.0 {
            break;
        }
        sum0 += t as f64 * count as f64;
        let mean0 = sum0 / w0;
        let mean1 = (sum_total - sum0) / w1;
        let between = w0 * w1 * (mean0 - mean1) * (mean0 - mean1);
        if between > best.1 {
            best = (t as u8, between);
        }
    }
    best.0
}

/// Clockwise Moore neighborhood in raster coordinates (y down),
/// starting at west.
const NEIGHBORS: [(i64, i64); 8] = [
    (-1, 0),  // W
    (-1, -1), // NW
    (0, -1),  // N
    (1, -1),  // NE
    (1, 0),   // E
    (1, 1),   // SE
    (0, 1),   // S
    (-1, 1),  // SW
];

/// Trace the boundary of the largest 8-connected foreground component by
/// Moore-neighbor tracing: stand on a boundary pixel, sweep its
/// neighborhood clockwise from the background backtrack, move to the
/// first foreground pixel found. The walk starts at the first foreground
/// pixel in row-major order and stops when it is about to repeat its
/// first move out of the start pixel, so the output is one closed cycle;
/// one-pixel-wide necks are visited twice. Orientation is
/// counter-clockwise in raster coordinates (positive shoelace area on
/// the raw x, y values).
pub fn trace_boundary(binary: &GrayImage) -> Result<Contour> {
    let component = largest_component(binary)?;
    let start = component.first_pixel;
    let mask = |x: i64, y: i64| -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < binary.width
            && (y as usize) < binary.height
            && component.mask[y as usize * binary.width + x as usize]
    };

    // One step of the walk: sweep clockwise around `cur` starting just
    // after the backtrack, returning the first foreground pixel and the
    // background pixel examined immediately before it.
    let scan = |cur: (i64, i64), back: (i64, i64)| -> Option<((i64, i64), (i64, i64))> {
        let rel = (back.0 - cur.0, back.1 - cur.1);
        let from = NEIGHBORS.iter().position(|&d| d == rel).expect("backtrack adjacent");
        let mut last_bg = back;
        for step in 1..=8 {
            let dir = NEIGHBORS[(from + step) % 8];
            let cand = (cur.0 + dir.0, cur.1 + dir.1);
            if mask(cand.0, cand.1) {
                return Some((cand, last_bg));
            }
            last_bg = cand;
        }
        None
    };

    // The west neighbor is background: everything earlier in row-major
    // order is outside the component.
    let b0 = (start.0 - 1, start.1);
    let Some(first_move) = scan(start, b0) else {
        return Err(Error::Extraction(
            "single-pixel component has no boundary curve".into(),
        ));
    };
    let mut points = vec![Point2::new(start.0 as f64, start.1 as f64)];
    let mut state = first_move;
    let cap = 4 * binary.width * binary.height + 8;
    loop {
        let (cur, back) = state;
        let Some(mv) = scan(cur, back) else {
            return Err(Error::Extraction("boundary walk left the component".into()));
        };
        if cur == start && mv == first_move {
            break;
        }
        points.push(Point2::new(cur.0 as f64, cur.1 as f64));
        if points.len() > cap {
            return Err(Error::Extraction("boundary trace failed to close".into()));
        }
        state = mv;
    }
    if points.len() < 4 {
        return Err(Error::Extraction(format!(
            "component too small: boundary of {} points cannot describe a closed curve",
            points.len()
        )));
    }
    Ok(Contour {
        points,
        closed: true,
    })
}

struct Component {
    mask: Vec<bool>,
    first_pixel: (i64, i64),
}

/// Label 8-connected foreground components and keep the largest one
/// (ties broken by first pixel in row-major order).
fn largest_component(binary: &GrayImage) -> Result<Component> {
    let (w, h) = (binary.width, binary.height);
    let mut labels = vec![0u32; w * h];
    let mut next_label = 0u32;
    let mut sizes: Vec<usize> = Vec::new();
    let mut firsts: Vec<(i64, i64)> = Vec::new();
    let mut stack = Vec::new();
    for idx in 0..w * h {
        if binary.pixels[idx] == 0 || labels[idx] != 0 {
            continue;
        }
        next_label += 1;
        let label = next_label;
        let mut size = 0usize;
        labels[idx] = label;
        stack.push(idx);
        while let Some(p) = stack.pop() {
            size += 1;
            let (x, y) = ((p % w) as i64, (p / w) as i64);
            for &(dx, dy) in &NEIGHBORS {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx as usize >= w || ny as usize >= h {
                    continue;
                }
                let nidx = ny as usize * w + nx as usize;
                if binary.pixels[nidx] != 0 && labels[nidx] == 0 {
                    labels[nidx] = label;
                    stack.push(nidx);
                }
            }
        }
        sizes.push(size);
        firsts.push(((idx % w) as i64, (idx / w) as i64));
    }
    if sizes.is_empty() {
        return Err(Error::Extraction("no foreground pixels".into()));
    }
    let best = (0..sizes.len()).max_by_key(|&i| (sizes[i], usize::MAX - i)).unwrap();
    if sizes[best] == 1 {
        return Err(Error::Extraction(
            "single-pixel component has no boundary curve".into(),
        ));
    }
    let target = best as u32 + 1;
    Ok(Component {
        mask: labels.iter().map(|&l| l == target).collect(),
        first_pixel: firsts[best],
    })
}

/// Foreground pixels of the image that touch the background through any
/// of their 8 neighbors (out-of-image counts as background). Brute-force
/// reference used by tests.
pub fn boundary_pixel_set(binary: &GrayImage) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for y in 0..binary.height {
        for x in 0..binary.width {
            if binary.get(x, y) == 0 {
                continue;
            }
            let touches_bg = NEIGHBORS
                .iter()
                .any(|&(dx, dy)| binary.at(x as i64 + dx, y as i64 + dy) == 0);
            if touches_bg {
                out.push((x, y));
            }
        }
    }
    out
}

/// Load an ordered point list from CSV: two numeric columns `x,y`, an
/// optional single header line, LF or CRLF endings.
pub fn load_points_csv(path: impl AsRef<Path>) -> Result<Contour> {
    let text = fs::read_to_string(path.as_ref())?;
    parse_points_csv(&text)
}

/// Parse CSV point data from memory; errors carry the 1-based line number.
pub fn parse_points_csv(text: &str) -> Result<Contour> {
    let mut points = Vec::new();
    for (number, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() {
            continue;
        }
        match parse_csv_line(line) {
            Ok(p) => points.push(p),
            Err(message) => {
                // A single fully non-numeric first line is a header;
                // anything with a numeric field is a malformed data row.
                let looks_like_header =
                    !line.split(',').any(|f| f.trim().parse::<f64>().is_ok());
                if number == 0 && looks_like_header {
                    continue;
                }
                return Err(Error::CsvParse {
                    line: number + 1,
                    message,
                });
            }
        }
    }
    if points.is_empty() {
        return Err(Error::CsvParse {
            line: 1,
            message: "no data rows".into(),
        });
    }
    let closed = points.len() > 1 && points[0] == *points.last().unwrap();
    Ok(Contour { points, closed })
}

fn parse_csv_line(line: &str) -> std::result::Result<Point2, String> {
    let mut fields = line.split(',');
    let x = fields.next().ok_or("missing x column")?.trim();
    let y = fields.next().ok_or_else(|| "missing y column".to_string())?.trim();
    if let Some(extra) = fields.next() {
        if !extra.trim().is_empty() {
            return Err(format!("unexpected extra column '{}'", extra.trim()));
        }
    }
    let px: f64 = x
        .parse()
        .map_err(|_| format!("invalid number '{x}'"))?;
    let py: f64 = y
        .parse()
        .map_err(|_| format!("invalid number '{y}'"))?;
    Point2::try_new(px, py).map_err(|_| format!("non-finite point ({x}, {y})"))
}
