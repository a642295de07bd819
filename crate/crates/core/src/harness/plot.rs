//! Static SVG line charts of sweep results.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::harness::config::db_to_linear;
use crate::harness::output::write_file;
use crate::harness::sweep::SweepResult;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;
const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    /// Drawn dashed without markers.
    pub reference: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

/// Roughly five round tick values covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = (hi - lo).max(1e-12);
    let raw = span / 5.0;
    let magnitude = 10f64.powf(raw.log10().floor());
    let step =
        [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * magnitude).find(|s| span / s <= 6.0).unwrap_or(10.0 * magnitude);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{:.4}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl LineChart {
    fn bounds(&self) -> (f64, f64, f64, f64) {
        let finite = self.series.iter().flat_map(|s| s.points.iter()).filter(|(x, y)| x.is_finite() && y.is_finite());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in finite {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            return (0.0, 1.0, 0.0, 1.0);
        }
        if x1 - x0 < 1e-12 {
            x0 -= 1.0;
            x1 += 1.0;
        }
        let pad = ((y1 - y0) * 0.05).max(1e-3 * y1.abs().max(1.0));
        (x0, x1, y0 - pad, y1 + pad)
    }

    /// Renders to an SVG document. Output depends only on the chart contents.
    pub fn to_svg(&self) -> String {
        let (x0, x1, y0, y1) = self.bounds();
        let plot_w = WIDTH - LEFT - RIGHT;
        let plot_h = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
        let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * plot_h;

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );

        for t in ticks(x0, x1) {
            let x = sx(t);
            let _ = writeln!(
                svg,
                r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#e0e0e0"/>"##,
                TOP + plot_h
            );
            let _ = writeln!(
                svg,
                r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                TOP + plot_h + 16.0,
                fmt_tick(t)
            );
        }
        for t in ticks(y0, y1) {
            let y = sy(t);
            let _ = writeln!(
                svg,
                r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e0e0e0"/>"##,
                LEFT + plot_w
            );
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                LEFT - 6.0,
                y + 4.0,
                fmt_tick(t)
            );
        }
        let _ = writeln!(
            svg,
            r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            LEFT + plot_w / 2.0,
            HEIGHT - 12.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            svg,
            r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
            TOP + plot_h / 2.0,
            TOP + plot_h / 2.0,
            escape(&self.y_label)
        );

        for (i, series) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let pts: Vec<String> = series
                .points
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let dash = if series.reference { r#" stroke-dasharray="6 4""# } else { "" };
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.8"{dash} points="{}"/>"#,
                pts.join(" ")
            );
            if !series.reference {
                for p in &pts {
                    let (cx, cy) = p.split_once(',').expect("formatted pair");
                    let _ = writeln!(svg, r#"<circle cx="{cx}" cy="{cy}" r="2.5" fill="{color}"/>"#);
                }
            }
            let ly = TOP + 14.0 + 16.0 * i as f64;
            let lx = LEFT + 12.0;
            let _ = writeln!(
                svg,
                r#"<line x1="{lx}" y1="{ly}" x2="{:.1}" y2="{ly}" stroke="{color}" stroke-width="1.8"{dash}/>"#,
                lx + 22.0
            );
            let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, lx + 28.0, ly + 4.0, escape(&series.name));
        }
        svg.push_str("</svg>\n");
        svg
    }
}

/// Noise power, signal power, SNR and MSE versus true SNR.
pub fn figure_charts(result: &SweepResult) -> Vec<(&'static str, LineChart)> {
    let n0 = result.config.n0;
    let pts = |f: &dyn Fn(&crate::harness::sweep::SweepPoint) -> f64| -> Vec<(f64, f64)> {
        result.points.iter().map(|p| (p.snr_db, f(p))).collect()
    };
    let x_label = "true SNR (dB)".to_string();
    let series = |name: &str, points: Vec<(f64, f64)>, reference: bool| Series { name: name.into(), points, reference };
    vec![
        (
            "noise_power.svg",
            LineChart {
                title: "Estimated average noise power".into(),
                x_label: x_label.clone(),
                y_label: "noise power".into(),
                series: vec![
                    series("blind estimate", pts(&|p| p.n0.mean), false),
                    series("ground truth", pts(&|_| n0), true),
                ],
            },
        ),
        (
            "signal_power.svg",
            LineChart {
                title: "Estimated average signal power".into(),
                x_label: x_label.clone(),
                y_label: "signal power".into(),
                series: vec![
                    series("blind estimate", pts(&|p| p.p_x.mean), false),
                    series("ground truth", pts(&|p| db_to_linear(p.snr_db) * n0), true),
                ],
            },
        ),
        (
            "snr.svg",
            LineChart {
                title: "Estimated SNR".into(),
                x_label: x_label.clone(),
                y_label: "estimated SNR (dB)".into(),
                series: vec![
                    series("blind estimate", pts(&|p| p.rho_db.mean), false),
                    series("ground truth", pts(&|p| p.snr_db), true),
                ],
            },
        ),
        (
            "mse.svg",
            LineChart {
                title: format!("Soft-threshold MSE (lambda = {})", result.config.lambda),
                x_label,
                y_label: "MSE".into(),
                series: vec![
                    series("blind estimate", pts(&|p| p.mse_blind.mean), false),
                    series("SURE, known noise power", pts(&|p| p.mse_sure.mean), false),
                    series("ground truth", pts(&|p| p.mse_true.mean), true),
                ],
            },
        ),
    ]
}

/// Writes the four charts into `dir`.
pub fn emit_plots(result: &SweepResult, dir: &Path) -> Result<Vec<PathBuf>> {
    figure_charts(result)
        .into_iter()
        .map(|(name, chart)| {
            let path = dir.join(name);
            write_file(&path, &chart.to_svg())?;
            Ok(path)
        })
        .collect()
}
