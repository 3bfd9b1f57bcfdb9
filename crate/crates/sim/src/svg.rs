//! SVG 1.1 line charts of report columns against time.

use std::fmt::Write;

use pnp_core::diagnostics::StepReport;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 140.0;
const MARGIN_Y: f64 = 40.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

pub struct Series<'a> {
    pub label: &'a str,
    pub values: Vec<f64>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn finite_range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    values.filter(|v| v.is_finite()).fold(None, |acc, v| match acc {
        None => Some((v, v)),
        Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
    })
}

fn padded((lo, hi): (f64, f64)) -> (f64, f64) {
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.05 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

/// Renders one chart. Non-finite samples break the polyline.
pub fn line_chart(title: &str, t: &[f64], series: &[Series]) -> String {
    let (x0, x1) = padded(finite_range(t.iter().copied()).unwrap_or((0.0, 1.0)));
    let (y0, y1) = padded(finite_range(series.iter().flat_map(|s| s.values.iter().copied())).unwrap_or((0.0, 1.0)));
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - 2.0 * MARGIN_Y;
    let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| MARGIN_Y + (y1 - y) / (y1 - y0) * plot_h;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_Y}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{xv:.3}</text>"#,
            sx(xv),
            HEIGHT - MARGIN_Y + 16.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{yv:.4e}</text>"#,
            MARGIN_LEFT - 6.0,
            sy(yv) + 4.0
        );
    }
    for (k, ser) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut path = String::new();
        let mut pen_down = false;
        for (&x, &y) in t.iter().zip(&ser.values) {
            if x.is_finite() && y.is_finite() {
                let _ = write!(path, "{}{:.2},{:.2} ", if pen_down { "L" } else { "M" }, sx(x), sy(y));
                pen_down = true;
            } else {
                pen_down = false;
            }
        }
        if !path.is_empty() {
            let _ = writeln!(s, r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, path.trim_end());
        }
        let ly = MARGIN_Y + 16.0 * k as f64 + 8.0;
        let lx = WIDTH - MARGIN_RIGHT + 10.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            escape(ser.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// The standard charts of a run as `(file stem, svg)` pairs.
pub fn report_charts(reports: &[StepReport]) -> Vec<(&'static str, String)> {
    let t: Vec<f64> = reports.iter().map(|r| r.t).collect();
    let col = |f: fn(&StepReport) -> f64| reports.iter().map(f).collect::<Vec<_>>();
    vec![
        (
            "mass",
            line_chart(
                "Mass",
                &t,
                &[Series { label: "p", values: col(|r| r.mass_p) }, Series { label: "n", values: col(|r| r.mass_n) }],
            ),
        ),
        (
            "energy",
            line_chart(
                "Energy",
                &t,
                &[
                    Series { label: "electrostatic", values: col(|r| r.energy_es) },
                    Series { label: "entropy", values: col(|r| r.entropy) },
                ],
            ),
        ),
        (
            "extrema",
            line_chart(
                "Extrema",
                &t,
                &[
                    Series { label: "max p", values: col(|r| r.max_p) },
                    Series { label: "min p", values: col(|r| r.min_p) },
                    Series { label: "max n", values: col(|r| r.max_n) },
                    Series { label: "min n", values: col(|r| r.min_n) },
                ],
            ),
        ),
    ]
}
