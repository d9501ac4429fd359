//! Deterministic SVG line charts for experiment reports.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::experiment::{ExperimentReport, Method, SweepParameter};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 70.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 55.0;
const PALETTE: [&str; 4] = ["#000000", "#1f5fbf", "#c0392b", "#2e8b57"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub axis: Axis,
    /// Draw a dotted vertical line at the curve's minimum.
    pub mark_min: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub y2_label: Option<String>,
    pub curves: Vec<Curve>,
}

fn range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() || !hi.is_finite() {
        return None;
    }
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 * lo.abs().max(1e-3) };
    Some((lo - pad, hi + pad))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl LineChart {
    pub fn render(&self) -> Result<String> {
        if self.curves.is_empty() || self.curves.iter().any(|c| c.points.is_empty()) {
            return Err(Error::invalid(format!("chart {:?} has no data", self.title)));
        }
        let all = self.curves.iter().flat_map(|c| c.points.iter());
        if all.clone().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::invalid(format!("chart {:?} has non-finite points", self.title)));
        }
        let (x0, x1) = range(all.map(|p| p.0)).expect("non-empty");
        let axis_range = |axis: Axis| {
            range(self.curves.iter().filter(|c| c.axis == axis).flat_map(|c| c.points.iter().map(|p| p.1)))
        };
        let left = axis_range(Axis::Left);
        let right = axis_range(Axis::Right);
        let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
        let sy = |y: f64, (lo, hi): (f64, f64)| MARGIN_TOP + (hi - y) / (hi - lo) * plot_h;

        let mut svg = String::new();
        let w = &mut svg;
        let _ = writeln!(
            w,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(w, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(w, r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(&self.title));
        let _ = writeln!(
            w,
            r##"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#444"/>"##
        );
        for i in 0..=4 {
            let x = x0 + (x1 - x0) * i as f64 / 4.0;
            let _ = writeln!(
                w,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{x:.3}</text>"#,
                sx(x),
                HEIGHT - MARGIN_BOTTOM + 18.0
            );
            for (r, anchor, tx) in [(left, "end", MARGIN_LEFT - 6.0), (right, "start", WIDTH - MARGIN_RIGHT + 6.0)] {
                if let Some((lo, hi)) = r {
                    let y = lo + (hi - lo) * i as f64 / 4.0;
                    let _ = writeln!(w, r#"<text x="{tx:.2}" y="{:.2}" text-anchor="{anchor}">{y:.3}</text>"#, sy(y, (lo, hi)) + 4.0);
                }
            }
        }
        let _ = writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_LEFT + plot_w / 2.0,
            HEIGHT - 12.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            w,
            r#"<text transform="translate(16 {:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
            MARGIN_TOP + plot_h / 2.0,
            escape(&self.y_label)
        );
        if let Some(label) = &self.y2_label {
            let _ = writeln!(
                w,
                r#"<text transform="translate({:.2} {:.2}) rotate(90)" text-anchor="middle">{}</text>"#,
                WIDTH - 16.0,
                MARGIN_TOP + plot_h / 2.0,
                escape(label)
            );
        }
        for (idx, curve) in self.curves.iter().enumerate() {
            let color = PALETTE[idx % PALETTE.len()];
            let yr = match curve.axis {
                Axis::Left => left,
                Axis::Right => right,
            }
            .expect("axis has points");
            let path: Vec<String> =
                curve.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y, yr))).collect();
            let _ = writeln!(
                w,
                r#"<polyline class="curve" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
                path.join(" ")
            );
            for &(x, y) in &curve.points {
                let _ = writeln!(w, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#, sx(x), sy(y, yr));
            }
            if curve.mark_min {
                let &(mx, _) = curve
                    .points
                    .iter()
                    .fold(&curve.points[0], |best, p| if p.1 < best.1 { p } else { best });
                let _ = writeln!(
                    w,
                    r#"<line class="min-marker" x1="{0:.2}" y1="{MARGIN_TOP}" x2="{0:.2}" y2="{1:.2}" stroke="{color}" stroke-dasharray="3 3"/>"#,
                    sx(mx),
                    MARGIN_TOP + plot_h
                );
            }
            let ly = MARGIN_TOP + 14.0 + 16.0 * idx as f64;
            let lx = MARGIN_LEFT + 10.0;
            let _ = writeln!(w, r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#, lx + 18.0);
            let _ = writeln!(w, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 24.0, ly + 4.0, escape(&curve.name));
        }
        svg.push_str("</svg>\n");
        Ok(svg)
    }
}

/// Charts for every panel of a report, paired with file stems.
pub fn report_charts(report: &ExperimentReport) -> Result<Vec<(String, LineChart)>> {
    let mut charts = Vec::new();
    if let Some(panels) = &report.figure3 {
        for (i, p) in panels.iter().enumerate() {
            charts.push((
                format!("figure3_panel{}", i + 1),
                LineChart {
                    title: format!("gamma = {}, rho = {}", p.gamma, p.rho),
                    x_label: "bandwidth r".into(),
                    y_label: "mean Hamming error".into(),
                    y2_label: Some("bandwidth score".into()),
                    curves: vec![
                        Curve {
                            name: "Hamming error".into(),
                            points: p.bandwidths.iter().copied().zip(p.mean_hamming.iter().copied()).collect(),
                            axis: Axis::Left,
                            mark_min: true,
                        },
                        Curve {
                            name: "score".into(),
                            points: p.tuning_grid.iter().copied().zip(p.mean_score.iter().copied()).collect(),
                            axis: Axis::Right,
                            mark_min: true,
                        },
                    ],
                },
            ));
        }
    }
    if let Some(sweep) = &report.sweep {
        let (stem, x_label) = match sweep.parameter {
            SweepParameter::Gamma => ("figure4_gamma", "gamma"),
            SweepParameter::Rho => ("figure4_rho", "rho"),
        };
        let curves = Method::ALL
            .iter()
            .filter_map(|&m| {
                let points: Vec<(f64, f64)> =
                    sweep.rows.iter().filter(|r| r.method == m).map(|r| (r.value, r.mean_hamming)).collect();
                (!points.is_empty()).then(|| Curve { name: m.name().into(), points, axis: Axis::Left, mark_min: false })
            })
            .collect();
        charts.push((
            stem.into(),
            LineChart {
                title: format!("{x_label} sweep"),
                x_label: x_label.into(),
                y_label: "mean Hamming error".into(),
                y2_label: None,
                curves,
            },
        ));
    }
    if let Some(rows) = &report.alignability {
        charts.push((
            "alignability".into(),
            LineChart {
                title: format!("non-alignable fraction, n = {}, T = {}", report.config.n, report.config.time_points),
                x_label: "switching probability per step".into(),
                y_label: "fraction".into(),
                y2_label: None,
                curves: vec![Curve {
                    name: "non-alignable".into(),
                    points: rows.iter().map(|r| (r.switch_probability, r.non_alignable_fraction)).collect(),
                    axis: Axis::Left,
                    mark_min: false,
                }],
            },
        ));
    }
    Ok(charts)
}

/// Renders every chart first, then writes `<stem>.svg` files. Nothing is
/// written when any chart fails to render.
pub fn emit_plots(report: &ExperimentReport, outdir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let rendered = report_charts(report)?
        .into_iter()
        .map(|(stem, chart)| Ok((stem, chart.render()?)))
        .collect::<Result<Vec<_>>>()?;
    let outdir = outdir.as_ref();
    rendered
        .into_iter()
        .map(|(stem, svg)| {
            let path = outdir.join(format!("{stem}.svg"));
            fs::write(&path, svg)?;
            Ok(path)
        })
        .collect()
}
