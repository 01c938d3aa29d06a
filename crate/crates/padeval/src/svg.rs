//! Deterministic SVG rendering of DET curves, EER convergence plots, KDE
//! score distributions, and confusion matrices.
//!
//! Rendering is a pure function of its inputs: no timestamps, no randomness,
//! and numbers are formatted to 6 significant digits so identical inputs
//! produce identical bytes.

use crate::curves::{probit, CurveSeries, DensitySeries, EerCurve};
use crate::error::{Error, Result};
use crate::metrics::ConfusionMatrix;

/// Lower clip for DET rates; probit(0) diverges so zero rates are drawn at
/// this floor. The upper clip follows the usual 50% ceiling.
pub const DET_RATE_FLOOR: f64 = 0.001;
pub const DET_RATE_CEIL: f64 = 0.5;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

const DET_TICKS: [(f64, &str); 9] = [
    (0.001, "0.1"),
    (0.002, "0.2"),
    (0.005, "0.5"),
    (0.01, "1"),
    (0.02, "2"),
    (0.05, "5"),
    (0.1, "10"),
    (0.2, "20"),
    (0.5, "50"),
];

/// Plot options shared by every renderer.
#[derive(Debug, Clone)]
pub struct PlotOptions {
    pub title: String,
    pub width: u32,
    pub height: u32,
}

impl Default for PlotOptions {
    fn default() -> Self {
        PlotOptions {
            title: String::new(),
            width: 640,
            height: 480,
        }
    }
}

/// Density axis scale for KDE plots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KdeScale {
    Linear,
    Log,
}

/// Fixed-layout frame shared by the renderers.
struct Frame {
    width: f64,
    height: f64,
    left: f64,
    right: f64,
    top: f64,
    bottom: f64,
}

impl Frame {
    fn new(opts: &PlotOptions) -> Frame {
        Frame {
            width: f64::from(opts.width),
            height: f64::from(opts.height),
            left: 64.0,
            right: f64::from(opts.width) - 20.0,
            top: 36.0,
            bottom: f64::from(opts.height) - 44.0,
        }
    }

    /// Maps a unit-interval pair to pixel coordinates (y grows downward).
    fn at(&self, ux: f64, uy: f64) -> (f64, f64) {
        (
            self.left + ux * (self.right - self.left),
            self.bottom - uy * (self.bottom - self.top),
        )
    }
}

/// Formats a value with 6 significant digits, trimming trailing zeros.
fn num(v: f64) -> String {
    debug_assert!(v.is_finite(), "non-finite SVG coordinate");
    if v == 0.0 {
        return "0".to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    let decimals = (5 - exp).clamp(0, 17) as usize;
    let s = format!("{v:.decimals$}");
    let trimmed = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        &s
    };
    if trimmed == "-0" {
        "0".to_string()
    } else {
        trimmed.to_string()
    }
}

fn esc(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Svg {
    body: String,
    frame: Frame,
}

impl Svg {
    fn new(opts: &PlotOptions) -> Svg {
        let frame = Frame::new(opts);
        let mut body = String::new();
        body.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        body.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
            w = num(frame.width),
            h = num(frame.height)
        ));
        body.push_str(&format!(
            "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n",
            num(frame.width),
            num(frame.height)
        ));
        if !opts.title.is_empty() {
            body.push_str(&format!(
                "<text x=\"{}\" y=\"20\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
                num(frame.width / 2.0),
                esc(&opts.title)
            ));
        }
        Svg { body, frame }
    }

    fn axes_box(&mut self) {
        let f = &self.frame;
        self.body.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>\n",
            num(f.left),
            num(f.top),
            num(f.right - f.left),
            num(f.bottom - f.top)
        ));
    }

    fn x_tick(&mut self, ux: f64, label: &str) {
        let (x, y) = self.frame.at(ux, 0.0);
        self.body.push_str(&format!(
            "<line x1=\"{x}\" y1=\"{y}\" x2=\"{x}\" y2=\"{y2}\" stroke=\"#000000\" stroke-width=\"1\"/>\n",
            x = num(x),
            y = num(y),
            y2 = num(y + 4.0)
        ));
        self.body.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"10\" text-anchor=\"middle\">{}</text>\n",
            num(x),
            num(y + 16.0),
            esc(label)
        ));
    }

    fn y_tick(&mut self, uy: f64, label: &str) {
        let (x, y) = self.frame.at(0.0, uy);
        self.body.push_str(&format!(
            "<line x1=\"{x2}\" y1=\"{y}\" x2=\"{x}\" y2=\"{y}\" stroke=\"#000000\" stroke-width=\"1\"/>\n",
            x = num(x),
            y = num(y),
            x2 = num(x - 4.0)
        ));
        self.body.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"10\" text-anchor=\"end\">{}</text>\n",
            num(x - 7.0),
            num(y + 3.0),
            esc(label)
        ));
    }

    fn axis_labels(&mut self, x_label: &str, y_label: &str) {
        let f = &self.frame;
        self.body.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            num((f.left + f.right) / 2.0),
            num(f.height - 8.0),
            esc(x_label)
        ));
        self.body.push_str(&format!(
            "<text x=\"14\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">{}</text>\n",
            num((f.top + f.bottom) / 2.0),
            num((f.top + f.bottom) / 2.0),
            esc(y_label)
        ));
    }

    /// Polyline through unit-space points, skipping consecutive points whose
    /// formatted pixel coordinates coincide.
    fn polyline(&mut self, pts: &[(f64, f64)], color: &str, dashed: bool) {
        let mut coords = String::new();
        let mut last: Option<(String, String)> = None;
        for &(ux, uy) in pts {
            let (x, y) = self.frame.at(ux, uy);
            let pair = (num(x), num(y));
            if last.as_ref() == Some(&pair) {
                continue;
            }
            if !coords.is_empty() {
                coords.push(' ');
            }
            coords.push_str(&format!("{},{}", pair.0, pair.1));
            last = Some(pair);
        }
        let dash = if dashed {
            " stroke-dasharray=\"4 3\""
        } else {
            ""
        };
        self.body.push_str(&format!(
            "<polyline points=\"{coords}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"{dash}/>\n"
        ));
    }

    fn legend(&mut self, entries: &[(String, &str)]) {
        let f = &self.frame;
        let x = f.left + 12.0;
        for (i, (label, color)) in entries.iter().enumerate() {
            let y = f.top + 14.0 + 16.0 * i as f64;
            self.body.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                num(x),
                num(y),
                num(x + 18.0),
                num(y),
                color
            ));
            self.body.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"10\">{}</text>\n",
                num(x + 24.0),
                num(y + 3.0),
                esc(label)
            ));
        }
    }

    fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

/// Probit-warped unit coordinate of a clipped rate.
fn det_unit(rate: f64) -> f64 {
    let clipped = rate.clamp(DET_RATE_FLOOR, DET_RATE_CEIL);
    let lo = probit(DET_RATE_FLOOR).expect("floor in (0,1)");
    let hi = probit(DET_RATE_CEIL).expect("ceil in (0,1)");
    (probit(clipped).expect("clipped rate in (0,1)") - lo) / (hi - lo)
}

/// DET plot: one probit-warped APCER/BPCER trade-off line per species, EER
/// percentages in the legend, and dashed guides at the BPCER_10 and
/// BPCER_20 operating points (APCER = 10% and 5%).
pub fn render_det_svg(series: &[(CurveSeries, f64)], opts: &PlotOptions) -> Result<String> {
    if series.is_empty() {
        return Err(Error::EmptyInput("no DET series".into()));
    }
    for (s, _) in series {
        if s.points.is_empty() {
            return Err(Error::EmptyInput(format!("DET series `{}` is empty", s.label)));
        }
        let mut units = s
            .points
            .iter()
            .map(|p| (det_unit(p.apcer), det_unit(p.bpcer)));
        let first = units.next().expect("non-empty");
        if units.all(|u| u == first) {
            return Err(Error::EmptyInput(format!(
                "DET series `{}` is entirely clipped to one point",
                s.label
            )));
        }
    }

    let mut svg = Svg::new(opts);
    svg.axes_box();
    for (r, label) in DET_TICKS {
        svg.x_tick(det_unit(r), label);
        svg.y_tick(det_unit(r), label);
    }
    svg.axis_labels("APCER (%)", "BPCER (%)");

    // operating-point guides
    for (rate, label) in [(0.10, "BPCER_10"), (0.05, "BPCER_20")] {
        let ux = det_unit(rate);
        svg.polyline(&[(ux, 0.0), (ux, 1.0)], "#000000", true);
        let (x, y) = svg.frame.at(ux, 1.0);
        svg.body.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"9\" text-anchor=\"middle\">{}</text>\n",
            num(x),
            num(y - 4.0),
            label
        ));
    }

    let mut legend = Vec::new();
    for (i, (s, eer)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<(f64, f64)> = s
            .points
            .iter()
            .map(|p| (det_unit(p.apcer), det_unit(p.bpcer)))
            .collect();
        svg.polyline(&pts, color, false);
        legend.push((format!("{} ({:.2}%)", s.label, eer * 100.0), color));
    }
    svg.legend(&legend);
    Ok(svg.finish())
}

/// EER convergence plot: APCER(τ) and BPCER(τ) versus the threshold with the
/// crossing marked.
pub fn render_eer_svg(curve: &EerCurve, opts: &PlotOptions) -> Result<String> {
    if curve.apcer.is_empty() || curve.bpcer.is_empty() {
        return Err(Error::EmptyInput("empty EER curve".into()));
    }
    let mut svg = Svg::new(opts);
    svg.axes_box();
    for i in 0..=5 {
        let u = i as f64 / 5.0;
        svg.x_tick(u, &format!("{u:.1}"));
        svg.y_tick(u, &format!("{u:.1}"));
    }
    svg.axis_labels("threshold", "error rate");

    let apcer_pts: Vec<(f64, f64)> = curve.apcer.iter().map(|&(t, r)| (t, r)).collect();
    let bpcer_pts: Vec<(f64, f64)> = curve.bpcer.iter().map(|&(t, r)| (t, r)).collect();
    svg.polyline(&apcer_pts, PALETTE[0], false);
    svg.polyline(&bpcer_pts, PALETTE[1], false);

    let (cx, cy) = svg.frame.at(curve.crossing.tau, curve.crossing.eer);
    svg.body.push_str(&format!(
        "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"#000000\"/>\n",
        num(cx),
        num(cy)
    ));
    svg.body.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"10\">EER {:.4}% @ t={:.4}</text>\n",
        num(cx + 6.0),
        num(cy - 6.0),
        curve.crossing.eer * 100.0,
        curve.crossing.tau
    ));
    svg.legend(&[
        (format!("APCER({})", curve.species), PALETTE[0]),
        ("BPCER".to_string(), PALETTE[1]),
    ]);
    Ok(svg.finish())
}

/// KDE plot of per-class score distributions, linear or log density axis.
pub fn render_kde_svg(
    series: &[DensitySeries],
    scale: KdeScale,
    opts: &PlotOptions,
) -> Result<String> {
    if series.is_empty() || series.iter().any(|s| s.xs.is_empty()) {
        return Err(Error::EmptyInput("no KDE series".into()));
    }
    const LOG_FLOOR: f64 = 1e-6;
    let dmax = series
        .iter()
        .flat_map(|s| s.densities.iter().copied())
        .fold(0.0, f64::max)
        .max(LOG_FLOOR);

    let unit_y = |d: f64| -> f64 {
        match scale {
            KdeScale::Linear => d / (dmax * 1.05),
            KdeScale::Log => {
                let lo = LOG_FLOOR.log10();
                let hi = (dmax * 1.05).log10();
                (d.max(LOG_FLOOR).log10() - lo) / (hi - lo)
            }
        }
    };

    let mut svg = Svg::new(opts);
    svg.axes_box();
    for i in 0..=5 {
        let u = i as f64 / 5.0;
        svg.x_tick(u, &format!("{u:.1}"));
    }
    match scale {
        KdeScale::Linear => {
            for i in 0..=4 {
                let d = dmax * 1.05 * i as f64 / 4.0;
                svg.y_tick(unit_y(d), &num(d));
            }
            svg.axis_labels("score", "density");
        }
        KdeScale::Log => {
            let mut p = LOG_FLOOR;
            while p <= dmax * 1.05 {
                svg.y_tick(unit_y(p), &format!("1e{:.0}", p.log10()));
                p *= 10.0;
            }
            svg.axis_labels("score", "density (log)");
        }
    }

    let mut legend = Vec::new();
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<(f64, f64)> = s
            .xs
            .iter()
            .zip(&s.densities)
            .map(|(&x, &d)| (x, unit_y(d)))
            .collect();
        svg.polyline(&pts, color, false);
        legend.push((s.class_label.clone(), color));
    }
    svg.legend(&legend);
    Ok(svg.finish())
}

/// Confusion matrix heat map with per-cell counts, shaded by row share.
pub fn render_confusion_svg(matrix: &ConfusionMatrix, opts: &PlotOptions) -> Result<String> {
    let k = matrix.labels.len();
    if k == 0 {
        return Err(Error::EmptyInput("empty confusion matrix".into()));
    }
    let mut svg = Svg::new(opts);
    let f = &svg.frame;
    let (x0, y0) = (f.left, f.top);
    let cell_w = (f.right - f.left) / k as f64;
    let cell_h = (f.bottom - f.top) / k as f64;

    for (r, row) in matrix.counts.iter().enumerate() {
        let row_sum: u64 = row.iter().sum();
        for (c, &count) in row.iter().enumerate() {
            let share = if row_sum == 0 {
                0.0
            } else {
                count as f64 / row_sum as f64
            };
            let x = x0 + c as f64 * cell_w;
            let y = y0 + r as f64 * cell_h;
            svg.body.push_str(&format!(
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#1f77b4\" fill-opacity=\"{}\" stroke=\"#000000\" stroke-width=\"0.5\"/>\n",
                num(x),
                num(y),
                num(cell_w),
                num(cell_h),
                num(share)
            ));
            let text_color = if share > 0.5 { "#ffffff" } else { "#000000" };
            svg.body.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\" fill=\"{}\">{}</text>\n",
                num(x + cell_w / 2.0),
                num(y + cell_h / 2.0 + 4.0),
                text_color,
                count
            ));
        }
    }
    for (i, label) in matrix.labels.iter().enumerate() {
        // column label (predicted)
        svg.body.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"10\" text-anchor=\"middle\">{}</text>\n",
            num(x0 + (i as f64 + 0.5) * cell_w),
            num(f.bottom + 16.0),
            esc(label)
        ));
        // row label (true)
        let ly = y0 + (i as f64 + 0.5) * cell_h;
        svg.body.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"10\" text-anchor=\"middle\" transform=\"rotate(-90 {} {})\">{}</text>\n",
            num(x0 - 12.0),
            num(ly),
            num(x0 - 12.0),
            num(ly),
            esc(label)
        ));
    }
    svg.axis_labels("predicted", "true");
    Ok(svg.finish())
}
