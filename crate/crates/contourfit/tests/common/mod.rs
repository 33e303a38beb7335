//! Shared fixtures and independent oracles for the integration suites.

#![allow(dead_code)]

use std::collections::BTreeSet;

use contourfit::{GrayImage, Point2};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Closed synthetic contour: an ellipse modulated by sinusoidal bumps,
/// sampled at `m` angles. Stands in for a silhouette edge.
pub fn bumpy_ellipse(
    m: usize,
    center: (f64, f64),
    radii: (f64, f64),
    bumps: usize,
    amplitude: f64,
) -> Vec<Point2> {
    (0..m)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
            let r = 1.0 + amplitude * (bumps as f64 * theta).sin();
            Point2::new(
                center.0 + radii.0 * theta.cos() * r,
                center.1 + radii.1 * theta.sin() * r,
            )
        })
        .collect()
}

/// Random nondecreasing knot vector for dimension `n` and degree `d`
/// with a nonempty evaluation domain. Mixes clamped, repeated-interior
/// and fully random styles.
pub fn random_knot_vector(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<f64> {
    loop {
        let style: u8 = rng.random_range(0..3);
        let mut v: Vec<f64> = match style {
            0 | 1 => {
                let mut interior: Vec<f64> = (0..n - d - 1)
                    .map(|_| {
                        let t: f64 = rng.random_range(0.0..1.0);
                        if style == 1 {
                            // Snap to a coarse grid to create repeated knots.
                            (t * 6.0).round() / 6.0
                        } else {
                            t
                        }
                    })
                    .collect();
                interior.sort_by(f64::total_cmp);
                let mut v = vec![0.0; d + 1];
                v.extend(interior);
                v.extend(vec![1.0; d + 1]);
                v
            }
            _ => {
                let mut v: Vec<f64> = (0..n + d + 1).map(|_| rng.random_range(0.0..1.0)).collect();
                v.sort_by(f64::total_cmp);
                v
            }
        };
        if v[d] < v[n] {
            return v;
        }
        v.clear();
    }
}

/// Random blob image for boundary-tracing tests: a union of filled disks
/// repaired so that tracing semantics and the brute-force boundary set
/// coincide (hole-free, no diagonal-only links between pixels, and no
/// pixels whose only background contact is diagonal).
pub fn random_blob(rng: &mut ChaCha8Rng, w: usize, h: usize) -> GrayImage {
    let mut mask = vec![false; w * h];
    let disks = rng.random_range(1..=4);
    for _ in 0..disks {
        let cx: f64 = rng.random_range(5.0..(w as f64 - 5.0));
        let cy: f64 = rng.random_range(5.0..(h as f64 - 5.0));
        let r: f64 = rng.random_range(2.5..7.0);
        for y in 0..h {
            for x in 0..w {
                let dx = x as f64 - cx;
                let dy = y as f64 - cy;
                if dx * dx + dy * dy <= r * r {
                    mask[y * w + x] = true;
                }
            }
        }
    }
    repair_mask(&mut mask, w, h);
    let pixels = mask.iter().map(|&m| u8::from(m)).collect();
    GrayImage::new(w, h, pixels).unwrap()
}

/// Make a foreground mask trace-friendly: fill enclosed background, turn
/// diagonal-only links into 4-connected ones, and fill the background
/// corner of any pixel whose background contacts are all diagonal.
pub fn repair_mask(mask: &mut [bool], w: usize, h: usize) {
    let fg = |mask: &[bool], x: i64, y: i64| -> bool {
        x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h && mask[y as usize * w + x as usize]
    };
    loop {
        let mut changed = false;

        // Fill background not 4-connected to the border.
        let mut outside = vec![false; w * h];
        let mut stack: Vec<usize> = Vec::new();
        for x in 0..w {
            for &y in &[0usize, h - 1] {
                let idx = y * w + x;
                if !mask[idx] && !outside[idx] {
                    outside[idx] = true;
                    stack.push(idx);
                }
            }
        }
        for y in 0..h {
            for &x in &[0usize, w - 1] {
                let idx = y * w + x;
                if !mask[idx] && !outside[idx] {
                    outside[idx] = true;
                    stack.push(idx);
                }
            }
        }
        while let Some(idx) = stack.pop() {
            let (x, y) = ((idx % w) as i64, (idx / w) as i64);
            for (dx, dy) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx as usize >= w || ny as usize >= h {
                    continue;
                }
                let nidx = ny as usize * w + nx as usize;
                if !mask[nidx] && !outside[nidx] {
                    outside[nidx] = true;
                    stack.push(nidx);
                }
            }
        }
        for idx in 0..w * h {
            if !mask[idx] && !outside[idx] {
                mask[idx] = true;
                changed = true;
            }
        }

        // 4-connect diagonal-only links.
        for y in 0..h as i64 {
            for x in 0..w as i64 {
                if !fg(mask, x, y) {
                    continue;
                }
                for (dx, dy) in [(1i64, 1i64), (1, -1)] {
                    if fg(mask, x + dx, y + dy)
                        && !fg(mask, x + dx, y)
                        && !fg(mask, x, y + dy)
                        && x + dx >= 0
                        && y + dy >= 0
                    {
                        mask[y as usize * w + (x + dx) as usize] = true;
                        changed = true;
                    }
                }
            }
        }

        // Fill diagonal background corners of pixels with no 4-connected
        // background contact.
        for y in 0..h as i64 {
            for x in 0..w as i64 {
                if !fg(mask, x, y) {
                    continue;
                }
                let has_4bg = [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)]
                    .iter()
                    .any(|&(dx, dy)| !fg(mask, x + dx, y + dy));
                if has_4bg {
                    continue;
                }
                for (dx, dy) in [(-1i64, -1i64), (1, -1), (-1, 1), (1, 1)] {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx >= 0
                        && ny >= 0
                        && (nx as usize) < w
                        && (ny as usize) < h
                        && !mask[ny as usize * w + nx as usize]
                    {
                        mask[ny as usize * w + nx as usize] = true;
                        changed = true;
                    }
                }
            }
        }

        if !changed {
            break;
        }
    }
}

/// Independent oracle: boundary pixels (foreground with a background
/// 8-neighbor, image edges counting as background) of the largest
/// 8-connected component, computed by plain labeling and scanning.
pub fn oracle_boundary_of_largest(img: &GrayImage) -> BTreeSet<(i64, i64)> {
    let (w, h) = (img.width, img.height);
    let fg = |x: i64, y: i64| -> bool {
        x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h && img.get(x as usize, y as usize) != 0
    };
    let mut label = vec![usize::MAX; w * h];
    let mut sizes: Vec<usize> = Vec::new();
    for start in 0..w * h {
        if img.pixels[start] == 0 || label[start] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        let mut size = 0;
        let mut stack = vec![start];
        label[start] = id;
        while let Some(idx) = stack.pop() {
            size += 1;
            let (x, y) = ((idx % w) as i64, (idx / w) as i64);
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let (nx, ny) = (x + dx, y + dy);
                    if fg(nx, ny) {
                        let nidx = ny as usize * w + nx as usize;
                        if label[nidx] == usize::MAX {
                            label[nidx] = id;
                            stack.push(nidx);
                        }
                    }
                }
            }
        }
        sizes.push(size);
    }
    let best = sizes
        .iter()
        .enumerate()
        .max_by_key(|&(i, &s)| (s, usize::MAX - i))
        .map(|(i, _)| i)
        .expect("at least one component");
    let mut out = BTreeSet::new();
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let idx = y as usize * w + x as usize;
            if img.pixels[idx] == 0 || label[idx] != best {
                continue;
            }
            let mut touches = false;
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if (dx != 0 || dy != 0) && !fg(x + dx, y + dy) {
                        touches = true;
                    }
                }
            }
            if touches {
                out.insert((x, y));
            }
        }
    }
    out
}

/// Rotate an image a quarter turn clockwise: `(x, y) -> (h - 1 - y, x)`.
pub fn rotate90(img: &GrayImage) -> GrayImage {
    let (w, h) = (img.width, img.height);
    let mut pixels = vec![0u8; w * h];
    for y in 0..h {
        for x in 0..w {
            let nx = h - 1 - y;
            let ny = x;
            pixels[ny * h + nx] = img.get(x, y);
        }
    }
    GrayImage::new(h, w, pixels).unwrap()
}

/// Equality of two sequences as cyclic words.
pub fn cyclic_eq(a: &[(i64, i64)], b: &[(i64, i64)]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    let doubled: Vec<(i64, i64)> = a.iter().chain(a.iter()).copied().collect();
    doubled.windows(b.len()).any(|win| win == b)
}

/// Minimal XML well-formedness check: every opened element closes in
/// order. Good enough for probing the emitted SVG structure.
pub fn xml_well_formed(text: &str) -> bool {
    let bytes = text.as_bytes();
    let mut stack: Vec<String> = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] != b'<' {
            i += 1;
            continue;
        }
        let rest = &text[i..];
        let Some(end_rel) = find_tag_end(rest) else {
            return false;
        };
        let tag = &rest[1..end_rel];
        i += end_rel + 1;
        if tag.starts_with('?') {
            if !tag.ends_with('?') {
                return false;
            }
            continue;
        }
        if let Some(name) = tag.strip_prefix('/') {
            match stack.pop() {
                Some(open) if open == name.trim() => {}
                _ => return false,
            }
            continue;
        }
        if tag.ends_with('/') {
            continue;
        }
        let name: String = tag
            .split_whitespace()
            .next()
            .unwrap_or_default()
            .to_string();
        if name.is_empty() {
            return false;
        }
        stack.push(name);
    }
    stack.is_empty()
}

/// Position of the closing `>` of the tag starting at `text[0] == '<'`,
/// skipping quoted attribute values.
fn find_tag_end(text: &str) -> Option<usize> {
    let bytes = text.as_bytes();
    let mut in_quote = false;
    for (i, &b) in bytes.iter().enumerate().skip(1) {
        match b {
            b'"' => in_quote = !in_quote,
            b'>' if !in_quote => return Some(i),
            _ => {}
        }
    }
    None
}

/// Serialize a binary-foreground image as an ASCII PGM with dark
/// foreground on light background, for CLI fixtures.
pub fn to_pgm_ascii(img: &GrayImage) -> String {
    let mut out = format!("P2\n{} {}\n255\n", img.width, img.height);
    for y in 0..img.height {
        for x in 0..img.width {
            let v = if img.get(x, y) != 0 { 10 } else { 245 };
            out.push_str(&format!("{v} "));
        }
        out.push('\n');
    }
    out
}

/// Points written as a CSV file body.
pub fn to_csv(points: &[Point2]) -> String {
    let mut out = String::from("x,y\n");
    for p in points {
        out.push_str(&format!("{},{}\n", p.x, p.y));
    }
    out
}
