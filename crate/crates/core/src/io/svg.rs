//! Plain SVG plots: torus scatter, real scatter and spectrum.
//!
//! Output depends only on the inputs. The second line is a generator
//! comment that carries the crate version; [`strip_generator_comment`]
//! removes it for golden-file comparisons.

use std::f64::consts::TAU;
use std::fmt::Write;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 56.0;
const PLOT: f64 = SIZE - 2.0 * MARGIN;
const RADIUS: f64 = 3.5;

/// Marker colors by class index; class 0 blue, class 1 red.
pub const PALETTE: [&str; 8] = [
    "#1f4fd8", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];
pub const UNLABELED: &str = "#808080";

const GENERATOR_PREFIX: &str = "<!-- generator: meigen ";

pub fn color(label: Option<usize>) -> &'static str {
    match label {
        Some(c) => PALETTE[c % PALETTE.len()],
        None => UNLABELED,
    }
}

pub fn strip_generator_comment(svg: &str) -> String {
    svg.lines()
        .filter(|l| !l.starts_with(GENERATOR_PREFIX))
        .map(|l| format!("{l}\n"))
        .collect()
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, "{GENERATOR_PREFIX}{} -->", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
        SIZE / 2.0,
        MARGIN / 2.0,
        escape(title)
    );
}

fn axis_labels(out: &mut String, x_label: &str, y_label: &str) {
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        SIZE / 2.0,
        SIZE - 14.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        SIZE / 2.0,
        SIZE / 2.0,
        escape(y_label)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn px(v: f64) -> String {
    format!("{:.2}", v)
}

fn points(out: &mut String, sx: impl Fn(f64) -> f64, sy: impl Fn(f64) -> f64, xs: &[f64], ys: &[f64], labels: Option<&[usize]>) {
    for (i, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        let c = color(labels.map(|l| l[i]));
        let _ = writeln!(
            out,
            r#"<circle cx="{}" cy="{}" r="{RADIUS}" fill="{c}" fill-opacity="0.8"/>"#,
            px(sx(x)),
            px(sy(y))
        );
    }
}

/// Phases on `[0, 2π)²` inside a square whose opposite sides are
/// identified. Cut lines are dashed.
pub fn torus_svg(xs: &[f64], ys: &[f64], labels: Option<&[usize]>, title: &str, x_label: &str, y_label: &str) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let sx = |x: f64| MARGIN + x / TAU * PLOT;
    let sy = |y: f64| SIZE - MARGIN - y / TAU * PLOT;
    let _ = writeln!(
        out,
        r##"<rect x="{m}" y="{m}" width="{p}" height="{p}" fill="none" stroke="#444" stroke-dasharray="6 4"/>"##,
        m = px(MARGIN),
        p = px(PLOT)
    );
    for (v, text) in [(0.0, "0"), (TAU / 2.0, "π"), (TAU, "2π")] {
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{text}</text>"#, px(sx(v)), px(SIZE - MARGIN + 16.0));
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{text}</text>"#, px(MARGIN - 6.0), px(sy(v) + 4.0));
    }
    points(&mut out, sx, sy, xs, ys, labels);
    axis_labels(&mut out, x_label, y_label);
    out.push_str("</svg>\n");
    out
}

fn padded_range(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() {
        return (-1.0, 1.0);
    }
    let span = (hi - lo).max(1e-12);
    (lo - 0.05 * span, hi + 0.05 * span)
}

fn frame(out: &mut String, xr: (f64, f64), yr: (f64, f64)) {
    let _ = writeln!(
        out,
        r##"<rect x="{m}" y="{m}" width="{p}" height="{p}" fill="none" stroke="#444"/>"##,
        m = px(MARGIN),
        p = px(PLOT)
    );
    let tick = |v: f64| crate::io::export::fmt_sig((v * 1e4).round() / 1e4);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="start">{}</text>"#, px(MARGIN), px(SIZE - MARGIN + 16.0), tick(xr.0));
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, px(SIZE - MARGIN), px(SIZE - MARGIN + 16.0), tick(xr.1));
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, px(MARGIN - 6.0), px(SIZE - MARGIN), tick(yr.0));
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, px(MARGIN - 6.0), px(MARGIN + 8.0), tick(yr.1));
}

/// Scatter of real coordinates with bounds fitted to the data.
pub fn scatter_svg(xs: &[f64], ys: &[f64], labels: Option<&[usize]>, title: &str, x_label: &str, y_label: &str) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let xr = padded_range(xs);
    let yr = padded_range(ys);
    frame(&mut out, xr, yr);
    let sx = |x: f64| MARGIN + (x - xr.0) / (xr.1 - xr.0) * PLOT;
    let sy = |y: f64| SIZE - MARGIN - (y - yr.0) / (yr.1 - yr.0) * PLOT;
    points(&mut out, sx, sy, xs, ys, labels);
    axis_labels(&mut out, x_label, y_label);
    out.push_str("</svg>\n");
    out
}

/// Eigenvalues against their index, one marker series per entry.
pub fn spectrum_svg(series: &[(&str, &[f64])], title: &str) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let count = series.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
    let all: Vec<f64> = series.iter().flat_map(|(_, v)| v.iter().copied()).chain([0.0]).collect();
    let xr = (-0.5, count.max(1) as f64 - 0.5);
    let yr = padded_range(&all);
    frame(&mut out, xr, yr);
    let sx = |x: f64| MARGIN + (x - xr.0) / (xr.1 - xr.0) * PLOT;
    let sy = |y: f64| SIZE - MARGIN - (y - yr.0) / (yr.1 - yr.0) * PLOT;
    for (s, (name, values)) in series.iter().enumerate() {
        let c = PALETTE[s % PALETTE.len()];
        for (k, &v) in values.iter().enumerate() {
            let (x, y) = (sx(k as f64), sy(v));
            if s % 2 == 0 {
                let _ = writeln!(out, r#"<circle cx="{}" cy="{}" r="{RADIUS}" fill="{c}"/>"#, px(x), px(y));
            } else {
                let _ = writeln!(
                    out,
                    r#"<rect x="{}" y="{}" width="7" height="7" fill="none" stroke="{c}"/>"#,
                    px(x - 3.5),
                    px(y - 3.5)
                );
            }
        }
        let ly = MARGIN + 16.0 + 16.0 * s as f64;
        let _ = writeln!(out, r#"<circle cx="{}" cy="{}" r="{RADIUS}" fill="{c}"/>"#, px(MARGIN + 12.0), px(ly - 4.0));
        let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, px(MARGIN + 22.0), px(ly), escape(name));
    }
    axis_labels(&mut out, "index", "eigenvalue");
    out.push_str("</svg>\n");
    out
}
