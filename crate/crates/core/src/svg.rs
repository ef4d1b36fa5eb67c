//! Minimal deterministic line plots written directly as SVG text.

use std::fmt::Write as _;

use crate::error::{PdmError, Result};
use crate::output::fmt_num;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 78.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Series {
    pub fn new(label: impl Into<String>, x: Vec<f64>, y: Vec<f64>) -> Self {
        Series { label: label.into(), x, y }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub title: String,
    pub x_label: String,
    pub x_unit: String,
    pub y_label: String,
    pub y_unit: String,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let nice = if f < 1.5 {
        1.0
    } else if f < 3.5 {
        2.0
    } else if f < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

/// Padded data range; degenerate ranges are widened to unit width.
fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    if hi - lo <= 1e-12 * hi.abs().max(1.0) {
        return (lo - 1.0, hi + 1.0);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn ticks(lo: f64, hi: f64) -> (Vec<f64>, usize) {
    let step = nice_step(hi - lo);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    ((first..=last).map(|k| k as f64 * step).collect(), decimals)
}

fn axis_title(label: &str, unit: &str) -> String {
    if unit.is_empty() {
        label.to_string()
    } else {
        format!("{label} [{unit}]")
    }
}

/// Renders the figure. Identical input yields identical bytes.
pub fn render_svg(fig: &Figure) -> Result<String> {
    for s in &fig.series {
        if s.x.len() != s.y.len() {
            return Err(PdmError::LengthMismatch { expected: s.x.len(), found: s.y.len() });
        }
    }
    let (x0, x1) = range(fig.series.iter().flat_map(|s| s.x.iter().copied()));
    let (y0, y1) = range(fig.series.iter().flat_map(|s| s.y.iter().copied()));
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut o = String::new();
    let _ = writeln!(
        o,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(o, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        o,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(&fig.title)
    );
    let _ = writeln!(
        o,
        r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#
    );

    let (xt, xd) = ticks(x0, x1);
    for t in xt {
        let px = sx(t);
        let _ = writeln!(
            o,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#,
            TOP + ph,
            TOP + ph + 5.0
        );
        let _ = writeln!(
            o,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{t:.xd$}</text>"#,
            TOP + ph + 18.0
        );
    }
    let (yt, yd) = ticks(y0, y1);
    for t in yt {
        let py = sy(t);
        let _ = writeln!(o, r#"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT:.2}" y2="{py:.2}" stroke="black"/>"#, LEFT - 5.0);
        let _ = writeln!(
            o,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{t:.yd$}</text>"#,
            LEFT - 8.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        o,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 12.0,
        escape(&axis_title(&fig.x_label, &fig.x_unit))
    );
    let _ = writeln!(
        o,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&axis_title(&fig.y_label, &fig.y_unit))
    );

    for (k, s) in fig.series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        // Non-finite samples split the curve.
        let mut runs: Vec<Vec<String>> = vec![Vec::new()];
        for (&x, &y) in s.x.iter().zip(&s.y) {
            if x.is_finite() && y.is_finite() {
                runs.last_mut().expect("non-empty").push(format!("{:.2},{:.2}", sx(x), sy(y)));
            } else if !runs.last().expect("non-empty").is_empty() {
                runs.push(Vec::new());
            }
        }
        for run in runs.iter().filter(|r| r.len() > 1) {
            let _ = writeln!(
                o,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                run.join(" ")
            );
        }
        let ly = TOP + 16.0 + 16.0 * k as f64;
        let lx = LEFT + pw - 130.0;
        let _ = writeln!(
            o,
            r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/>"#,
            ly - 4.0,
            lx + 20.0,
            ly - 4.0
        );
        let _ = writeln!(o, r#"<text x="{:.2}" y="{ly:.2}">{}</text>"#, lx + 26.0, escape(&s.label));
    }
    o.push_str("</svg>\n");
    Ok(o)
}

/// The plotted data as CSV: a shared x column followed by one column per
/// series. All series must share the same abscissae.
pub fn figure_csv(fig: &Figure) -> Result<String> {
    let first = fig
        .series
        .first()
        .ok_or_else(|| PdmError::InvalidParameter("figure has no series".into()))?;
    for s in &fig.series {
        if s.x != first.x {
            return Err(PdmError::Precondition(format!("series '{}' has different abscissae", s.label)));
        }
        if s.y.len() != s.x.len() {
            return Err(PdmError::LengthMismatch { expected: s.x.len(), found: s.y.len() });
        }
    }
    let clean = |s: &str| s.replace(',', ";");
    let mut header = vec![format!("{}[{}]", clean(&fig.x_label), fig.x_unit)];
    header.extend(fig.series.iter().map(|s| format!("{}[{}]", clean(&s.label), fig.y_unit)));
    let mut out = header.join(",");
    out.push('\n');
    for (i, &x) in first.x.iter().enumerate() {
        let mut cells = vec![fmt_num(x)];
        cells.extend(fig.series.iter().map(|s| fmt_num(s.y[i])));
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig() -> Figure {
        let x: Vec<f64> = (0..11).map(|i| i as f64 * 0.1).collect();
        Figure {
            title: "a < b & c".into(),
            x_label: "x".into(),
            x_unit: "length".into(),
            y_label: "m".into(),
            y_unit: "mass".into(),
            series: vec![
                Series::new("one", x.clone(), x.iter().map(|v| v * v).collect()),
                Series::new("two", x.clone(), x.iter().map(|v| if *v == 0.5 { f64::NAN } else { -v }).collect()),
            ],
        }
    }

    #[test]
    fn deterministic_and_escaped() {
        let a = render_svg(&fig()).unwrap();
        assert_eq!(a, render_svg(&fig()).unwrap());
        assert!(a.contains("a &lt; b &amp; c"));
        assert!(a.ends_with("</svg>\n"));
        // The NaN splits the second curve in two.
        assert_eq!(a.matches("<polyline").count(), 3);
    }

    #[test]
    fn tick_steps_are_round() {
        assert_eq!(nice_step(10.0), 2.0);
        assert_eq!(nice_step(0.3), 0.05);
        let (t, d) = ticks(-0.05, 1.05);
        assert_eq!(t.len(), 6);
        assert_eq!(d, 1);
    }

    #[test]
    fn csv_columns() {
        let c = figure_csv(&fig()).unwrap();
        let mut lines = c.lines();
        assert_eq!(lines.next().unwrap(), "x[length],one[mass],two[mass]");
        assert_eq!(c.lines().count(), 12);
        let mut bad = fig();
        bad.series[1].x[0] = 9.0;
        assert!(figure_csv(&bad).is_err());
    }
}
