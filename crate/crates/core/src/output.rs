//! CSV, single-line JSON and simple SVG renderings of results.

use std::fmt::Write as _;

use serde::Serialize;

use crate::diffraction::Curve;
use crate::pipeline::Figure2Row;
use crate::protocol::{Symbol, WindowReport};

pub const FIGURE2_HEADER: &str = "alpha_deg,ns_case_I,ns_case_IIa,ns_case_IIb,ns_mixed";
pub const CURVE_HEADER: &str = "x_um,intensity";
pub const WINDOW_HEADER: &str =
    "window_index,start,boundary,d_c_clicks,d_x_clicks,estimated_n_s,decoded_symbol";

pub fn figure2_csv(rows: &[Figure2Row]) -> String {
    let mut out = format!("{FIGURE2_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.alpha_deg, r.ns_case_i, r.ns_case_iia, r.ns_case_iib, r.ns_mixed
        );
    }
    out
}

pub fn curve_csv(curve: &Curve) -> String {
    let mut out = format!("{CURVE_HEADER}\n");
    for (x, y) in curve.x_um.iter().zip(&curve.intensity) {
        let _ = writeln!(out, "{x},{y}");
    }
    out
}

pub fn windows_csv(reports: &[WindowReport]) -> String {
    let mut out = format!("{WINDOW_HEADER}\n");
    for r in reports {
        let n_s = r.estimated_n_s.map(|v| v.to_string()).unwrap_or_default();
        let sym = match r.decoded_symbol {
            Symbol::Zero => "0",
            Symbol::One => "1",
            Symbol::Ambiguous => "ambiguous",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.window_index, r.start, r.boundary, r.d_c_clicks, r.d_x_clicks, n_s, sym
        );
    }
    out
}

/// Single-line JSON with keys in declaration order, newline-terminated.
pub fn json_line<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("result types serialize");
    s.push('\n');
    s
}

pub struct Series<'a> {
    pub label: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
}

const PALETTE: [&str; 6] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"];

/// Line plot of one or more series sharing axes.
pub fn svg_plot(title: &str, x_label: &str, y_label: &str, series: &[Series<'_>]) -> String {
    let (w, h, m) = (720.0, 440.0, 60.0);
    let finite = |v: &&f64| v.is_finite();
    let xs = series.iter().flat_map(|s| s.x.iter()).filter(finite);
    let ys = series.iter().flat_map(|s| s.y.iter()).filter(finite);
    let (x0, x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let (mut y0, mut y1) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if y1.partial_cmp(&y0) != Some(std::cmp::Ordering::Greater) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let x_span = if x1 > x0 { x1 - x0 } else { 1.0 };
    let px = |x: f64| m + (x - x0) / x_span * (w - 2.0 * m);
    let py = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        w / 2.0,
        escape(title)
    );
    let _ = writeln!(
        out,
        r#"<path d="M{m} {m} V{} H{}" fill="none" stroke="black"/>"#,
        h - m,
        w - m
    );
    for (v, anchor, x, y) in [
        (x0, "start", m, h - m + 16.0),
        (x1, "end", w - m, h - m + 16.0),
    ] {
        let _ = writeln!(out, r#"<text x="{x}" y="{y}" text-anchor="{anchor}">{}</text>"#, fmt_tick(v));
    }
    for (v, y) in [(y0, h - m), (y1, m)] {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            m - 6.0,
            y + 4.0,
            fmt_tick(v)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        w / 2.0,
        h - 18.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        h / 2.0,
        h / 2.0,
        escape(y_label)
    );
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .x
            .iter()
            .zip(s.y)
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
        let ly = m + 16.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="3"/><text x="{}" y="{}">{}</text>"#,
            w - m - 150.0,
            w - m - 130.0,
            w - m - 124.0,
            ly + 4.0,
            escape(s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e5 || v.abs() < 1e-3) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
