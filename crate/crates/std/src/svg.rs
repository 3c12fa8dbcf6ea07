//! Minimal SVG line plots and heatmaps.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{AppError, AppResult};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn open(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axes(s: &mut String, x: (f64, f64), y: (f64, f64), xlabel: &str, ylabel: &str) {
    let (x0, x1, y0, y1) = (MARGIN, WIDTH - MARGIN / 2.0, HEIGHT - MARGIN, MARGIN / 2.0 + 10.0);
    let _ = writeln!(
        s,
        r#"<path d="M{x0},{y1} L{x0},{y0} L{x1},{y0}" fill="none" stroke="black"/>"#
    );
    for (v, px) in [(x.0, x0), (x.1, x1)] {
        let _ = writeln!(s, r#"<text x="{px}" y="{}" text-anchor="middle">{v:.4}</text>"#, y0 + 16.0);
    }
    for (v, py) in [(y.0, y0), (y.1, y1)] {
        let _ = writeln!(s, r#"<text x="{}" y="{py}" text-anchor="end">{v:.4}</text>"#, x0 - 4.0);
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 12.0,
        escape(xlabel)
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(ylabel)
    );
}

fn save(path: &Path, mut s: String) -> AppResult<()> {
    s.push_str("</svg>\n");
    std::fs::write(path, s).map_err(|e| AppError::io(path, e))
}

/// Line plot of one or more named series over a shared x axis.
pub fn line_plot(
    path: &Path,
    title: &str,
    (xlabel, ylabel): (&str, &str),
    x: &[f64],
    series: &[(&str, &[f64])],
) -> AppResult<()> {
    let xr = bounds(x.iter().copied());
    let yr = bounds(series.iter().flat_map(|(_, v)| v.iter().copied()));
    let sx = |v: f64| MARGIN + (v - xr.0) / (xr.1 - xr.0) * (WIDTH - 1.5 * MARGIN);
    let sy = |v: f64| HEIGHT - MARGIN - (v - yr.0) / (yr.1 - yr.0) * (HEIGHT - 1.5 * MARGIN - 10.0);
    let mut s = open(title);
    axes(&mut s, xr, yr, xlabel, ylabel);
    for (k, (name, ys)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let points: Vec<String> = x
            .iter()
            .zip(ys.iter())
            .filter(|(a, b)| a.is_finite() && b.is_finite())
            .map(|(a, b)| format!("{:.2},{:.2}", sx(*a), sy(*b)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            points.join(" ")
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
            WIDTH - 1.5 * MARGIN - 60.0,
            MARGIN + 14.0 * k as f64,
            escape(name)
        );
    }
    save(path, s)
}

/// Grayscale heatmap of a row-major `rows × cols` matrix, normalized to its
/// maximum. Row 0 is drawn at the bottom.
pub fn heatmap(path: &Path, title: &str, rows: usize, cols: usize, values: &[f64]) -> AppResult<()> {
    let max = values.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max);
    let (w, h) = (WIDTH - 1.5 * MARGIN, HEIGHT - 1.5 * MARGIN - 10.0);
    let (cw, ch) = (w / cols as f64, h / rows as f64);
    let mut s = open(title);
    for r in 0..rows {
        for c in 0..cols {
            let v = if max > 0.0 { values[r * cols + c] / max } else { 0.0 };
            if v < 1e-3 {
                continue;
            }
            let shade = (255.0 * (1.0 - v)).round() as u8;
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({shade},{shade},{shade})"/>"#,
                MARGIN + c as f64 * cw,
                HEIGHT - MARGIN - (r + 1) as f64 * ch,
                cw + 0.05,
                ch + 0.05
            );
        }
    }
    axes(&mut s, (0.0, cols as f64), (0.0, rows as f64), "idler index", "signal index");
    save(path, s)
}
