//! Deterministic SVG rendering: bifurcation diagrams (active parameter
//! against `L^2` norm), solution profiles, and comb spectra.
//!
//! All output is plain text assembled from the input data with fixed
//! formatting, so identical inputs give byte-identical files.

use crate::io::StoredBranch;
use crate::params::Mode;
use crate::trivial;
use crate::{Error, FieldState, Result};
use std::f64::consts::PI;
use std::fmt::Write as _;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;

/// Branch color cycle.
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#e377c2",
];

/// What to draw in a bifurcation diagram.
#[derive(Debug, Clone)]
pub struct DiagramSpec {
    pub mode: Mode,
    pub d: f64,
    pub fixed: f64,
    /// Draw the closed-form constant-solution curve in black.
    pub overlay_trivial: bool,
    /// Continued branches (all must share mode, `d`, and fixed value).
    pub branches: Vec<StoredBranch>,
    /// Write a short label next to each event marker.
    pub label_events: bool,
    pub title: String,
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN_L + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - MARGIN_L - MARGIN_R)
    }
    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_B - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - MARGIN_T - MARGIN_B)
    }
    fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1
    }
}

/// Round a span into human-friendly tick positions.
fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    if !(hi > lo) {
        return vec![lo];
    }
    let raw = (hi - lo) / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let step = mag
        * if norm < 1.5 {
            1.0
        } else if norm < 3.0 {
            2.0
        } else if norm < 7.0 {
            5.0
        } else {
            10.0
        };
    let first = (lo / step).ceil() * step;
    let mut ticks = Vec::new();
    let mut t = first;
    while t <= hi + 1e-9 * step {
        // Snap exact zeros so labels render as "0".
        ticks.push(if t.abs() < 1e-9 * step { 0.0 } else { t });
        t += step;
    }
    ticks
}

fn fmt_tick(x: f64) -> String {
    let s = format!("{x:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" || s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn svg_open(title: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH:.0} {HEIGHT:.0}\" font-family=\"sans-serif\">"
    );
    let _ = writeln!(
        out,
        "<rect width=\"{WIDTH:.0}\" height=\"{HEIGHT:.0}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{}</text>",
        WIDTH / 2.0,
        xml_escape(title)
    );
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let (px0, px1) = (MARGIN_L, WIDTH - MARGIN_R);
    let (py0, py1) = (HEIGHT - MARGIN_B, MARGIN_T);
    let _ = writeln!(
        out,
        "<rect x=\"{px0:.2}\" y=\"{py1:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"#333\"/>",
        px1 - px0,
        py0 - py1
    );
    for t in nice_ticks(frame.x0, frame.x1, 6) {
        let x = frame.px(t);
        let _ = writeln!(
            out,
            "<line x1=\"{x:.2}\" y1=\"{py0:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#333\"/>",
            py0 + 5.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"12\">{}</text>",
            py0 + 20.0,
            fmt_tick(t)
        );
    }
    for t in nice_ticks(frame.y0, frame.y1, 6) {
        let y = frame.py(t);
        let _ = writeln!(
            out,
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{px0:.2}\" y2=\"{y:.2}\" stroke=\"#333\"/>",
            px0 - 5.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-size=\"12\">{}</text>",
            px0 - 8.0,
            y + 4.0,
            fmt_tick(t)
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"13\">{}</text>",
        (px0 + px1) / 2.0,
        HEIGHT - 12.0,
        xml_escape(x_label)
    );
    let _ = writeln!(
        out,
        "<text x=\"16\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 {:.2})\">{}</text>",
        (py0 + py1) / 2.0,
        (py0 + py1) / 2.0,
        xml_escape(y_label)
    );
}

/// Draw a sequence of data points as polyline segments, breaking where
/// points leave the frame.
fn polyline(out: &mut String, frame: &Frame, pts: &[(f64, f64)], color: &str, width: f64) {
    let mut run: Vec<String> = Vec::new();
    let flush = |run: &mut Vec<String>, out: &mut String| {
        if run.len() > 1 {
            let _ = writeln!(
                out,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{width}\"/>",
                run.join(" ")
            );
        }
        run.clear();
    };
    for (x, y) in pts {
        if frame.contains(*x, *y) && x.is_finite() && y.is_finite() {
            run.push(format!("{:.2},{:.2}", frame.px(*x), frame.py(*y)));
        } else {
            flush(&mut run, out);
        }
    }
    flush(&mut run, out);
}

fn marker(out: &mut String, x: f64, y: f64, kind: &str, color: &str) {
    match kind {
        "turning_point" => {
            let _ = writeln!(
                out,
                "<path d=\"M {x:.2} {:.2} L {:.2} {y:.2} L {x:.2} {:.2} L {:.2} {y:.2} Z\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
                y - 6.0,
                x + 6.0,
                y + 6.0,
                x - 6.0
            );
        }
        "trivial_return" => {
            let _ = writeln!(
                out,
                "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"5\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>"
            );
        }
        "secondary_bif_candidate" => {
            let _ = writeln!(
                out,
                "<path d=\"M {:.2} {:.2} L {:.2} {:.2} M {:.2} {:.2} L {:.2} {:.2}\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
                x - 5.0,
                y - 5.0,
                x + 5.0,
                y + 5.0,
                x - 5.0,
                y + 5.0,
                x + 5.0,
                y - 5.0
            );
        }
        _ => {
            let _ = writeln!(
                out,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"8\" height=\"8\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
                x - 4.0,
                y - 4.0
            );
        }
    }
}

fn marker_label(kind: &str) -> &'static str {
    match kind {
        "turning_point" => "fold",
        "trivial_return" => "return",
        "secondary_bif_candidate" => "2nd",
        _ => "stop",
    }
}

/// Sample the constant-solution curve as `(active parameter, L^2 norm)`
/// pairs over a parameter window.
fn trivial_curve_points(mode: Mode, fixed: f64, x_lo: f64, x_hi: f64) -> Vec<(f64, f64)> {
    let sqrt_pi = PI.sqrt();
    let mut pts = Vec::new();
    match mode {
        Mode::Hat => {
            let f = fixed;
            let m = 4000;
            for i in 1..m {
                let t = -1.0 + 2.0 * i as f64 / m as f64;
                let zeta = trivial::zeta_hat(t, f);
                if zeta.is_finite() && zeta >= x_lo && zeta <= x_hi {
                    let norm = f.abs() * (1.0 - t * t).sqrt() * sqrt_pi;
                    pts.push((zeta, norm));
                }
            }
        }
        Mode::Bar => {
            let zeta = fixed;
            // Walk s upward until the forcing leaves the window for good.
            let mut s = 1e-3;
            let ds = 1e-3;
            while s < 1e3 {
                let f = trivial::forcing_bar(s, zeta);
                if f > x_hi && s * s > zeta {
                    break;
                }
                if f >= x_lo && f <= x_hi {
                    pts.push((f, s * sqrt_pi));
                }
                s += ds;
            }
        }
    }
    pts
}

/// Render a bifurcation diagram.
pub fn diagram_svg(spec: &DiagramSpec) -> Result<String> {
    if spec.branches.is_empty() && !spec.overlay_trivial {
        return Err(Error::Precondition(
            "diagram needs at least one branch or the trivial-curve overlay".into(),
        ));
    }
    for b in &spec.branches {
        if b.mode != spec.mode || (b.d - spec.d).abs() > 1e-12 || (b.fixed - spec.fixed).abs() > 1e-12
        {
            return Err(Error::Precondition(format!(
                "branch (mode={}, d={}, fixed={}) does not match the diagram (mode={}, d={}, fixed={})",
                b.mode, b.d, b.fixed, spec.mode, spec.d, spec.fixed
            )));
        }
    }

    // Data window: branch extents, else a representative window of the
    // trivial curve.
    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (y_lo, mut y_hi) = (0.0_f64, f64::NEG_INFINITY);
    for b in &spec.branches {
        for r in &b.rows {
            x_lo = x_lo.min(r.param);
            x_hi = x_hi.max(r.param);
            y_hi = y_hi.max(r.l2norm);
        }
    }
    if spec.branches.is_empty() {
        match spec.mode {
            Mode::Hat => {
                let f = spec.fixed;
                for t in [-0.95, 0.0, 0.95] {
                    let z = trivial::zeta_hat(t, f);
                    x_lo = x_lo.min(z);
                    x_hi = x_hi.max(z);
                }
                y_hi = f.abs() * PI.sqrt();
            }
            Mode::Bar => {
                let s_top = (spec.fixed.abs().sqrt() + 2.0).max(2.0);
                x_lo = 0.0;
                x_hi = trivial::forcing_bar(s_top, spec.fixed);
                y_hi = s_top * PI.sqrt();
            }
        }
    }
    if spec.overlay_trivial {
        // The curve's norms inside the window can exceed branch norms.
        for (_, norm) in trivial_curve_points(spec.mode, spec.fixed, x_lo, x_hi) {
            y_hi = y_hi.max(norm);
        }
    }
    let pad_x = (x_hi - x_lo).max(1e-6) * 0.06;
    let pad_y = (y_hi - y_lo).max(1e-6) * 0.06;
    let frame = Frame {
        x0: x_lo - pad_x,
        x1: x_hi + pad_x,
        y0: (y_lo - pad_y).max(0.0),
        y1: y_hi + pad_y,
    };

    let mut out = svg_open(&spec.title);
    let x_label = match spec.mode {
        Mode::Hat => "detuning",
        Mode::Bar => "forcing",
    };
    axes(&mut out, &frame, x_label, "L2 norm");

    if spec.overlay_trivial {
        let pts = trivial_curve_points(spec.mode, spec.fixed, frame.x0, frame.x1);
        polyline(&mut out, &frame, &pts, "black", 1.5);
    }
    for (bi, b) in spec.branches.iter().enumerate() {
        let color = PALETTE[bi % PALETTE.len()];
        let pts: Vec<(f64, f64)> = b.rows.iter().map(|r| (r.param, r.l2norm)).collect();
        polyline(&mut out, &frame, &pts, color, 1.2);
        for r in &b.rows {
            for (kind, _) in &r.events {
                if frame.contains(r.param, r.l2norm) {
                    let (mx, my) = (frame.px(r.param), frame.py(r.l2norm));
                    marker(&mut out, mx, my, kind, color);
                    if spec.label_events {
                        let _ = writeln!(
                            out,
                            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\" fill=\"{color}\">{}</text>",
                            mx + 8.0,
                            my - 8.0,
                            marker_label(kind)
                        );
                    }
                }
            }
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Render a solution profile: both components and the modulus over
/// `[0, pi]`.
pub fn profile_svg(u: &FieldState, title: &str) -> String {
    let nodes = u.grid().nodes();
    let modulus = u.modulus();
    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    for v in u.a1().iter().chain(u.a2()).chain(&modulus) {
        y_lo = y_lo.min(*v);
        y_hi = y_hi.max(*v);
    }
    let pad = (y_hi - y_lo).max(1e-6) * 0.08;
    let frame = Frame {
        x0: 0.0,
        x1: PI,
        y0: y_lo - pad,
        y1: y_hi + pad,
    };
    let mut out = svg_open(title);
    axes(&mut out, &frame, "x", "field");
    for (values, color) in [
        (u.a1(), PALETTE[0]),
        (u.a2(), PALETTE[1]),
        (&modulus[..], "black"),
    ] {
        let pts: Vec<(f64, f64)> = nodes.iter().copied().zip(values.iter().copied()).collect();
        polyline(&mut out, &frame, &pts, color, 1.5);
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\">re (blue)  im (red)  modulus (black)</text>",
        MARGIN_L + 10.0,
        MARGIN_T + 16.0
    );
    out.push_str("</svg>\n");
    out
}

/// Render a comb spectrum (`log10` line magnitudes against mode index)
/// as an impulse plot.
pub fn spectrum_svg(lines: &[f64], title: &str) -> String {
    let floor = -16.0;
    let y_hi = lines.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let frame = Frame {
        x0: -0.5,
        x1: lines.len() as f64 - 0.5,
        y0: floor,
        y1: (y_hi + 1.0).max(floor + 2.0),
    };
    let mut out = svg_open(title);
    axes(&mut out, &frame, "mode", "log10 line magnitude");
    for (k, v) in lines.iter().enumerate() {
        let v = v.max(floor);
        let x = frame.px(k as f64);
        let _ = writeln!(
            out,
            "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"{}\" stroke-width=\"2\"/>",
            frame.py(floor),
            frame.py(v),
            PALETTE[0]
        );
    }
    out.push_str("</svg>\n");
    out
}
