//! SVG heatmap of a sweep.
//!
//! Cells are laid out with lambda on the horizontal axis (log scale, one
//! column per grid value) and m on the vertical axis (one row per value,
//! smallest at the bottom). Color runs through five viridis stops, dark purple
//! for the lowest mean RMSE to yellow for the highest; the stops increase in
//! luminance, so the map is monotone. NaN cells are drawn light grey.

use std::fmt::Write as _;
use std::path::Path;

use flrn_core::sweep::SweepRow;

use crate::error::{AppError, AppResult};
use crate::io::write_text;

const STOPS: [[u8; 3]; 5] = [
    [0x44, 0x01, 0x54],
    [0x3b, 0x52, 0x8b],
    [0x21, 0x91, 0x8c],
    [0x5e, 0xc9, 0x62],
    [0xfd, 0xe7, 0x25],
];

/// Color of `u ∈ [0, 1]`, linear between the stops.
pub fn colormap(u: f64) -> [u8; 3] {
    let u = if u.is_finite() { u.clamp(0.0, 1.0) } else { 0.0 };
    let x = u * (STOPS.len() - 1) as f64;
    let i = (x.floor() as usize).min(STOPS.len() - 2);
    let f = x - i as f64;
    let mut out = [0u8; 3];
    for c in 0..3 {
        let (a, b) = (STOPS[i][c] as f64, STOPS[i + 1][c] as f64);
        out[c] = (a + (b - a) * f).round() as u8;
    }
    out
}

fn hex(c: [u8; 3]) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Renders the heatmap document.
pub fn heatmap_svg(rows: &[SweepRow]) -> AppResult<String> {
    if rows.is_empty() {
        return Err(AppError::usage("cannot draw an empty sweep"));
    }
    let lambdas = sorted_unique(rows.iter().map(|r| r.lambda).collect());
    let ms = sorted_unique(rows.iter().map(|r| r.m as f64).collect());
    let finite: Vec<f64> = rows.iter().map(|r| r.mean_rmse).filter(|v| v.is_finite()).collect();
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let (cell_w, cell_h) = (24.0, 18.0);
    let (left, top) = (80.0, 40.0);
    let plot_w = cell_w * lambdas.len() as f64;
    let plot_h = cell_h * ms.len() as f64;
    let legend_x = left + plot_w + 30.0;
    let width = legend_x + 110.0;
    let height = top + plot_h + 70.0;

    let mut s = String::new();
    let w = &mut s;
    // writes to a String cannot fail
    let _ = writeln!(
        w,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">
<title>Mean test RMSE over (lambda, m)</title>
<defs><linearGradient id="legend" x1="0" y1="1" x2="0" y2="0">"#
    );
    for (i, c) in STOPS.iter().enumerate() {
        let _ = writeln!(w, r#"<stop offset="{}" stop-color="{}"/>"#, i as f64 / 4.0, hex(*c));
    }
    let _ = writeln!(w, "</linearGradient></defs>\n<g id=\"cells\">");
    for r in rows {
        let col = lambdas.iter().position(|&l| l == r.lambda).unwrap_or(0);
        let row = ms.iter().position(|&m| m == r.m as f64).unwrap_or(0);
        let x = left + cell_w * col as f64;
        let y = top + plot_h - cell_h * (row + 1) as f64;
        let fill = if r.mean_rmse.is_finite() {
            let u = if hi > lo { (r.mean_rmse - lo) / (hi - lo) } else { 0.0 };
            hex(colormap(u))
        } else {
            "#d9d9d9".to_string()
        };
        let _ = writeln!(
            w,
            r#"<rect class="cell" x="{x}" y="{y}" width="{cell_w}" height="{cell_h}" fill="{fill}"><title>m={} lambda={:e} rmse={}</title></rect>"#,
            r.m,
            r.lambda,
            r.mean_rmse
        );
    }
    let _ = writeln!(w, "</g>");

    // axes
    let base = top + plot_h;
    let _ = writeln!(
        w,
        r#"<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    let step = (lambdas.len() / 5).max(1);
    for (i, l) in lambdas.iter().enumerate() {
        if i % step == 0 || i + 1 == lambdas.len() {
            let x = left + cell_w * (i as f64 + 0.5);
            let _ = writeln!(w, r#"<text x="{x}" y="{}" text-anchor="middle">{l:.1e}</text>"#, base + 15.0);
        }
    }
    let step = (ms.len() / 6).max(1);
    for (i, m) in ms.iter().enumerate() {
        if i % step == 0 || i + 1 == ms.len() {
            let y = base - cell_h * (i as f64 + 0.5) + 4.0;
            let _ = writeln!(w, r#"<text x="{}" y="{y}" text-anchor="end">{m}</text>"#, left - 6.0);
        }
    }
    let _ = writeln!(
        w,
        r#"<text x="{}" y="{}" text-anchor="middle">lambda (log scale)</text>"#,
        left + plot_w / 2.0,
        base + 40.0
    );
    let _ = writeln!(
        w,
        r#"<text x="20" y="{0}" text-anchor="middle" transform="rotate(-90 20 {0})">m</text>"#,
        top + plot_h / 2.0
    );

    // legend
    let _ = writeln!(
        w,
        r#"<g id="legend-bar"><rect x="{legend_x}" y="{top}" width="16" height="{plot_h}" fill="url(#legend)" stroke="black"/>"#
    );
    let fmt = |v: f64| if v.is_finite() { format!("{v:.4}") } else { "n/a".to_string() };
    let _ = writeln!(w, r#"<text x="{}" y="{}">{}</text>"#, legend_x + 22.0, top + 10.0, fmt(hi));
    let _ = writeln!(w, r#"<text x="{}" y="{}">{}</text>"#, legend_x + 22.0, base, fmt(lo));
    let _ = writeln!(w, r#"<text x="{legend_x}" y="{}">mean RMSE</text></g>"#, top - 10.0);
    let _ = writeln!(w, "</svg>");
    Ok(s)
}

pub fn write_heatmap_svg(path: &Path, rows: &[SweepRow]) -> AppResult<()> {
    write_text(path, &heatmap_svg(rows)?)
}
