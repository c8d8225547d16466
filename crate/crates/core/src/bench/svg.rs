//! Standalone SVG line charts of sweep results.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::SweepResult;
use crate::error::{Error, Result};

pub const Y_LABEL: &str = "Average secrecy rate (bits/s/Hz)";

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 5;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Linear map from `[lo, hi]` onto `[a, b]`; a degenerate range maps to the midpoint.
fn scale(v: f64, lo: f64, hi: f64, a: f64, b: f64) -> f64 {
    if hi > lo {
        a + (v - lo) / (hi - lo) * (b - a)
    } else {
        0.5 * (a + b)
    }
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

pub fn to_svg_string(result: &SweepResult) -> Result<String> {
    if result.points.is_empty() {
        return Err(Error::InvalidConfig(
            "plot needs at least one axis point".into(),
        ));
    }
    let xs = result.axis_values();
    let (x_lo, x_hi) = (xs[0], xs[xs.len() - 1]);
    let means: Vec<f64> = result
        .points
        .iter()
        .flat_map(|p| p.stats.iter().map(|s| s.mean))
        .collect();
    let y_min = means.iter().copied().fold(f64::INFINITY, f64::min);
    let y_max = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut y_lo, mut y_hi) = if means.is_empty() {
        (0.0, 1.0)
    } else {
        (y_min.min(0.0), y_max)
    };
    if y_hi <= y_lo {
        y_hi = y_lo + 1.0;
    }
    y_hi += 0.05 * (y_hi - y_lo);
    if y_lo < 0.0 {
        y_lo -= 0.05 * (y_hi - y_lo);
    }
    let (px0, px1) = (LEFT, WIDTH - RIGHT);
    let (py0, py1) = (HEIGHT - BOTTOM, TOP);
    let sx = |v: f64| scale(v, x_lo, x_hi, px0, px1);
    let sy = |v: f64| scale(v, y_lo, y_hi, py0, py1);

    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(
        w,
        r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#
    );
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        w,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        w,
        r#"<g id="plot-area" data-x-min="{x_lo}" data-x-max="{x_hi}" data-y-lo="{y_lo}" data-y-hi="{y_hi}" data-px0="{px0}" data-px1="{px1}" data-py0="{py0}" data-py1="{py1}">"#
    );
    let _ = writeln!(
        w,
        r#"<rect x="{px0}" y="{py1}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        px1 - px0,
        py0 - py1
    );
    for k in 0..=TICKS {
        let v = y_lo + (y_hi - y_lo) * k as f64 / TICKS as f64;
        let y = sy(v);
        let _ = writeln!(
            w,
            r##"<line x1="{px0}" y1="{y:.3}" x2="{px1}" y2="{y:.3}" stroke="#dddddd"/>"##
        );
        let _ = writeln!(
            w,
            r#"<text x="{}" y="{:.3}" text-anchor="end">{}</text>"#,
            px0 - 6.0,
            y + 4.0,
            tick_label(v)
        );
    }
    for &v in &xs {
        let x = sx(v);
        let _ = writeln!(
            w,
            r#"<line x1="{x:.3}" y1="{py0}" x2="{x:.3}" y2="{}" stroke="black"/>"#,
            py0 + 5.0
        );
        let _ = writeln!(
            w,
            r#"<text x="{x:.3}" y="{}" text-anchor="middle">{}</text>"#,
            py0 + 18.0,
            tick_label(v)
        );
    }
    let _ = writeln!(w, "</g>");
    let _ = writeln!(
        w,
        r#"<text class="x-label" x="{}" y="{}" text-anchor="middle">{}</text>"#,
        0.5 * (px0 + px1),
        HEIGHT - 15.0,
        escape(result.axis.label())
    );
    let _ = writeln!(
        w,
        r#"<text class="y-label" x="20" y="{0}" text-anchor="middle" transform="rotate(-90 20 {0})">{1}</text>"#,
        0.5 * (py0 + py1),
        escape(Y_LABEL)
    );
    for (k, scheme) in result.schemes.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let ys: Vec<f64> = result.points.iter().map(|p| p.stats[k].mean).collect();
        let lo = ys.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let name = escape(&scheme.name());
        let _ = writeln!(
            w,
            r#"<g data-scheme="{name}" data-y-min="{lo}" data-y-max="{hi}" stroke="{color}" fill="{color}">"#
        );
        let pts: Vec<(f64, f64)> = xs.iter().zip(&ys).map(|(&x, &y)| (sx(x), sy(y))).collect();
        if pts.len() >= 2 {
            let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
            let _ = writeln!(
                w,
                r#"<polyline fill="none" stroke-width="2" points="{}"/>"#,
                path.join(" ")
            );
        }
        for (x, y) in &pts {
            let _ = writeln!(w, r#"<circle cx="{x:.3}" cy="{y:.3}" r="3.5"/>"#);
        }
        let ly = TOP + 10.0 + 20.0 * k as f64;
        let lx = px1 + 15.0;
        let _ = writeln!(
            w,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke-width="2"/>"#,
            lx + 24.0
        );
        let _ = writeln!(
            w,
            r#"<text x="{}" y="{}" stroke="none" fill="black">{name}</text>"#,
            lx + 30.0,
            ly + 4.0
        );
        let _ = writeln!(w, "</g>");
    }
    let _ = writeln!(w, "</svg>");
    Ok(s)
}

/// Writes `to_svg_string(result)` to `path`.
pub fn emit_plot(result: &SweepResult, path: &Path) -> Result<()> {
    fs::write(path, to_svg_string(result)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::{Axis, Scheme, SchemeStats, SweepPoint};
    use super::*;

    fn result(values: &[f64], schemes: &[Scheme]) -> SweepResult {
        SweepResult {
            axis: Axis::MElements,
            schemes: schemes.to_vec(),
            points: values
                .iter()
                .map(|&value| SweepPoint {
                    value,
                    stats: schemes
                        .iter()
                        .enumerate()
                        .map(|(k, &s)| {
                            SchemeStats::from_samples(s, vec![(value * (k + 1) as f64).sqrt()])
                        })
                        .collect(),
                    wall_time: 0.0,
                })
                .collect(),
        }
    }

    fn attr(node: roxmltree::Node, name: &str) -> f64 {
        node.attribute(name).unwrap().parse().unwrap()
    }

    #[test]
    fn single_point_has_markers_only() {
        let svg = to_svg_string(&result(&[10.0], &[Scheme::NoIrs, Scheme::AoContinuous])).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        assert_eq!(
            doc.descendants()
                .filter(|n| n.has_tag_name("polyline"))
                .count(),
            0
        );
        assert_eq!(
            doc.descendants()
                .filter(|n| n.has_tag_name("circle"))
                .count(),
            2
        );
    }

    #[test]
    fn well_formed_with_labels() {
        let svg = to_svg_string(&result(&[10.0, 20.0, 30.0], &Scheme::STANDARD)).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let texts: Vec<&str> = doc.descendants().filter_map(|n| n.text()).collect();
        assert!(texts.contains(&Y_LABEL));
        assert!(texts.contains(&"m_elements"));
        let series = doc
            .descendants()
            .filter(|n| n.attribute("data-scheme").is_some())
            .count();
        assert_eq!(series, 5);
        assert!(to_svg_string(&result(&[], &[Scheme::NoIrs])).is_err());
    }

    #[test]
    fn marker_coordinates_invert_to_means() {
        let r = result(
            &[10.0, 20.0, 30.0],
            &[Scheme::NoIrs, Scheme::RandomIrs, Scheme::AoContinuous],
        );
        let svg = to_svg_string(&r).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let area = doc
            .descendants()
            .find(|n| n.attribute("id") == Some("plot-area"))
            .unwrap();
        let (y_lo, y_hi) = (attr(area, "data-y-lo"), attr(area, "data-y-hi"));
        let (py0, py1) = (attr(area, "data-py0"), attr(area, "data-py1"));
        // one pixel in data units, the rendering resolution
        let tol = (y_hi - y_lo) / (py0 - py1) * 1e-2;
        for (k, g) in doc
            .descendants()
            .filter(|n| n.attribute("data-scheme").is_some())
            .enumerate()
        {
            let ys: Vec<f64> = g
                .children()
                .filter(|n| n.has_tag_name("circle"))
                .map(|c| y_lo + (py0 - attr(c, "cy")) / (py0 - py1) * (y_hi - y_lo))
                .collect();
            let means = r.means(r.schemes[k]).unwrap();
            let lo = means.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let got_lo = ys.iter().copied().fold(f64::INFINITY, f64::min);
            let got_hi = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert!((got_lo - lo).abs() < tol && (got_hi - hi).abs() < tol);
            assert_eq!(attr(g, "data-y-min"), lo);
            assert_eq!(attr(g, "data-y-max"), hi);
        }
    }
}
