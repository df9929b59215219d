//! Scatter plot of a result set in the λ-plane, written as plain SVG.
//!
//! Output depends only on the inputs; all coordinates are printed with a
//! fixed number of decimals.

use std::fmt::Write as _;

use itlab_core::regions::{boundary_im, ParabolicRegion};
use num_complex::Complex64;

use crate::config::PlotSpec;
use crate::results::ResultSet;
use crate::CliError;

const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 55.0;
const CURVE_SAMPLES: usize = 240;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    width: f64,
    height: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN_LEFT + (x - self.x0) / (self.x1 - self.x0) * (self.width - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        MARGIN_TOP + (self.y1 - y) / (self.y1 - self.y0) * (self.height - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn transform(z: Complex64, log: bool) -> Complex64 {
    if !log || z.norm() == 0.0 {
        return z;
    }
    z / z.norm() * (1.0 + z.norm()).log10()
}

fn nice_step(range: f64) -> f64 {
    let raw = range / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let r = raw / mag;
    let m = if r < 1.5 {
        1.0
    } else if r < 3.5 {
        2.0
    } else if r < 7.5 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = nice_step(hi - lo);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// Off-screen points are pulled to a band a few frame heights away so the
/// printed coordinates stay short.
fn polyline(frame: &Frame, pts: &[Complex64], class: &str) -> String {
    let band = 4.0 * frame.y1.abs().max(frame.y0.abs());
    let mut s = format!("<polyline class=\"{class}\" fill=\"none\" points=\"");
    for (i, p) in pts.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{:.2},{:.2}", frame.px(p.re), frame.py(p.im.clamp(-band, band)));
    }
    s.push_str("\"/>\n");
    s
}

fn branch(c: f64, delta: f64, x_max: f64, sign: f64, log: bool) -> Vec<Complex64> {
    (0..=CURVE_SAMPLES)
        .map(|i| {
            let x = x_max * i as f64 / CURVE_SAMPLES as f64;
            transform(Complex64::new(x, sign * boundary_im(c, delta, x)), log)
        })
        .collect()
}

/// SVG text of the stable eigenvalues in `results`, the parabola
/// `|Im λ| = C|λ|^{1−δ}` (solid), the same curve with the fitted constant
/// (dashed), the cutoff circle `|λ| = C` (dotted) and the line
/// `Re λ = left bound`.
pub fn render_figure(results: &ResultSet, region: &ParabolicRegion, opts: &PlotSpec) -> Result<String, CliError> {
    let pts: Vec<Complex64> = results.stable().map(|r| r.lambda).collect();
    if pts.is_empty() {
        return Err(CliError::Input("no stable eigenvalues to plot".into()));
    }
    let log = opts.log_modulus;
    let (left_bound, fitted) = results.region.as_ref().map_or((0.0, None), |r| (r.left_bound, Some(r.fitted_c)));
    let tp: Vec<Complex64> = pts.iter().map(|&z| transform(z, log)).collect();
    let lb = transform(Complex64::new(left_bound, 0.0), log).re;

    let mut x0 = tp.iter().map(|z| z.re).fold(lb.min(0.0), f64::min);
    let mut x1 = tp.iter().map(|z| z.re).fold(0.0, f64::max);
    let ymax = tp.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let pad = 0.08 * (x1 - x0).max(1e-3);
    x0 -= pad;
    x1 += pad;
    let y1 = if ymax > 0.0 { 1.15 * ymax } else { 0.5 * (x1 - x0) };
    let frame = Frame { x0, x1, y0: -y1, y1, width: opts.width as f64, height: opts.height as f64 };
    let (w, h) = (frame.width, frame.height);
    let (left, right, top, bottom) = (MARGIN_LEFT, w - MARGIN_RIGHT, MARGIN_TOP, h - MARGIN_BOTTOM);

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    s.push_str("<style>.eig{fill:#1f4e9c;stroke:none}.region{stroke:#b22222;stroke-width:1.5}.fitted{stroke:#2e8b57;stroke-width:1.2;stroke-dasharray:6 4}.cutoff{stroke:#777;stroke-dasharray:2 3;fill:none}.left{stroke:#8b4513;stroke-width:1.2}.axis{stroke:#000;stroke-width:0.8}.grid{stroke:#ddd;stroke-width:0.6}</style>\n");
    let _ = writeln!(
        s,
        "<defs><clipPath id=\"plot\"><rect x=\"{left:.2}\" y=\"{top:.2}\" width=\"{:.2}\" height=\"{:.2}\"/></clipPath></defs>",
        right - left,
        bottom - top
    );
    let _ = writeln!(s, "<rect x=\"0\" y=\"0\" width=\"{w:.0}\" height=\"{h:.0}\" fill=\"#fff\"/>");

    for t in ticks(frame.x0, frame.x1) {
        let x = frame.px(t);
        let _ = writeln!(s, "<line class=\"grid\" x1=\"{x:.2}\" y1=\"{top:.2}\" x2=\"{x:.2}\" y2=\"{bottom:.2}\"/>");
        let _ = writeln!(s, "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>", bottom + 16.0, fmt_tick(t));
    }
    for t in ticks(frame.y0, frame.y1) {
        let y = frame.py(t);
        let _ = writeln!(s, "<line class=\"grid\" x1=\"{left:.2}\" y1=\"{y:.2}\" x2=\"{right:.2}\" y2=\"{y:.2}\"/>");
        let _ = writeln!(s, "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>", left - 6.0, y + 4.0, fmt_tick(t));
    }
    let _ = writeln!(
        s,
        "<rect class=\"axis\" fill=\"none\" x=\"{left:.2}\" y=\"{top:.2}\" width=\"{:.2}\" height=\"{:.2}\"/>",
        right - left,
        bottom - top
    );
    let (ax, ay) = (frame.px(0.0), frame.py(0.0));
    let _ = writeln!(s, "<line class=\"axis\" x1=\"{left:.2}\" y1=\"{ay:.2}\" x2=\"{right:.2}\" y2=\"{ay:.2}\"/>");
    if ax >= left && ax <= right {
        let _ = writeln!(s, "<line class=\"axis\" x1=\"{ax:.2}\" y1=\"{top:.2}\" x2=\"{ax:.2}\" y2=\"{bottom:.2}\"/>");
    }
    let (xlabel, ylabel) = if log { ("log10(1+|λ|) cos arg λ", "log10(1+|λ|) sin arg λ") } else { ("Re λ", "Im λ") };
    let _ = writeln!(s, "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{xlabel}</text>", 0.5 * (left + right), h - 14.0);
    let _ = writeln!(
        s,
        "<text x=\"18\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2})\">{ylabel}</text>",
        0.5 * (top + bottom),
        0.5 * (top + bottom)
    );

    s.push_str("<g clip-path=\"url(#plot)\">\n");
    // curves are sampled in the λ-plane up to the largest real part on screen
    let re_max = pts.iter().map(|z| z.re).fold(0.0, f64::max).max(1.0) * 1.5 + region.c;
    for sign in [1.0, -1.0] {
        s.push_str(&polyline(&frame, &branch(region.c, region.delta, re_max, sign, log), "region"));
    }
    if let Some(fc) = fitted.filter(|&f| f > 0.0) {
        for sign in [1.0, -1.0] {
            s.push_str(&polyline(&frame, &branch(fc, region.delta, re_max, sign, log), "fitted"));
        }
    }
    let circle: Vec<Complex64> = (0..=CURVE_SAMPLES)
        .map(|i| transform(Complex64::from_polar(region.c, 2.0 * std::f64::consts::PI * i as f64 / CURVE_SAMPLES as f64), log))
        .collect();
    s.push_str(&polyline(&frame, &circle, "cutoff"));
    let lx = frame.px(lb);
    let _ = writeln!(s, "<line class=\"left\" x1=\"{lx:.2}\" y1=\"{top:.2}\" x2=\"{lx:.2}\" y2=\"{bottom:.2}\"/>");
    for z in &tp {
        let _ = writeln!(s, "<circle class=\"eig\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\"/>", frame.px(z.re), frame.py(z.im));
    }
    s.push_str("</g>\n");

    let mut legend = vec![
        format!("{} stable eigenvalues", pts.len()),
        format!("|Im λ| = {}|λ|^(1−{})", fmt_tick(region.c), fmt_tick(region.delta)),
    ];
    if let Some(fc) = fitted {
        legend.push(format!("fitted constant {fc:.4}"));
    }
    legend.push(format!("Re λ = {}", fmt_tick(left_bound)));
    let _ = writeln!(s, "<text x=\"{left:.2}\" y=\"{:.2}\">{}</text>", top - 14.0, legend.join("; "));
    s.push_str("</svg>\n");
    Ok(s)
}
