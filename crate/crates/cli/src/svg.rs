//! Minimal static SVG plots. Filled markers sit at alpha = 0 mod 2 pi,
//! open markers at alpha = pi mod 2 pi, crosses at the fixed zeros.

use std::f64::consts::PI;
use std::fmt::Write;

use num_complex::Complex64;
use phasepole::tracer::{SweepResult, Trajectory};

const W: f64 = 800.0;
const H: f64 = 600.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn fit(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Self {
        let lo_hi = |v: &mut dyn Iterator<Item = f64>| {
            v.filter(|x| x.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)))
        };
        let (mut x0, mut x1) = lo_hi(&mut xs.clone());
        let (mut y0, mut y1) = lo_hi(&mut ys.clone());
        if !x0.is_finite() {
            (x0, x1) = (-1.0, 1.0);
        }
        if !y0.is_finite() {
            (y0, y1) = (-1.0, 1.0);
        }
        let pad = |a: f64, b: f64| {
            let d = (b - a).max(1e-9 * a.abs().max(1.0)) * 0.05;
            (a - d, b + d)
        };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        Self { x0, x1, y0, y1 }
    }

    fn x(&self, v: f64) -> f64 {
        MARGIN + (v - self.x0) / (self.x1 - self.x0) * (W - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        H - MARGIN - (v - self.y0) / (self.y1 - self.y0) * (H - 2.0 * MARGIN)
    }
}

fn open(out: &mut String, title: &str, xlabel: &str, ylabel: &str, f: &Frame) {
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{title}</text>"#, W / 2.0);
    let (l, r, t, b) = (MARGIN, W - MARGIN, MARGIN, H - MARGIN);
    let _ = writeln!(out, r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#, r - l, b - t);
    if f.x0 < 0.0 && f.x1 > 0.0 {
        let _ = writeln!(out, r##"<line x1="{0:.3}" y1="{t}" x2="{0:.3}" y2="{b}" stroke="#999" stroke-dasharray="4 3"/>"##, f.x(0.0));
    }
    if f.y0 < 0.0 && f.y1 > 0.0 {
        let _ = writeln!(out, r##"<line x1="{l}" y1="{0:.3}" x2="{r}" y2="{0:.3}" stroke="#999" stroke-dasharray="4 3"/>"##, f.y(0.0));
    }
    let _ = writeln!(out, r#"<text x="{l}" y="{}" font-size="11">{:.1}</text>"#, b + 16.0, f.x0);
    let _ = writeln!(out, r#"<text x="{r}" y="{}" font-size="11" text-anchor="end">{:.1}</text>"#, b + 16.0, f.x1);
    let _ = writeln!(out, r#"<text x="{}" y="{b}" font-size="11" text-anchor="end">{:.1}</text>"#, l - 4.0, f.y0);
    let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{:.1}</text>"#, l - 4.0, t + 10.0, f.y1);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">{xlabel}</text>"#, W / 2.0, H - 16.0);
    let _ = writeln!(
        out,
        r#"<text x="16" y="{0}" text-anchor="middle" font-size="13" transform="rotate(-90 16 {0})">{ylabel}</text>"#,
        H / 2.0
    );
}

fn polyline(out: &mut String, f: &Frame, pts: &[(f64, f64)], color: &str, dashed: bool) {
    if pts.len() < 2 {
        return;
    }
    let mut s = String::new();
    for (x, y) in pts {
        let _ = write!(s, "{:.3},{:.3} ", f.x(*x), f.y(*y));
    }
    let dash = if dashed { r#" stroke-dasharray="6 4""# } else { "" };
    let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.4"{dash}/>"#, s.trim_end());
}

/// `k`-plane overlay of trajectories, clipped to `|k| <= cutoff`.
pub fn trajectories_svg(title: &str, trajs: &[Trajectory], fixed_zeros: &[Complex64], cutoff: f64) -> String {
    let inside = |k: Complex64| k.norm() <= cutoff;
    let all = trajs.iter().flat_map(|t| t.points.iter().map(|p| p.k)).filter(|&k| inside(k));
    let f = Frame::fit(all.clone().map(|k| k.re), all.map(|k| k.im));
    let mut out = String::new();
    open(&mut out, title, "Re k (MeV)", "Im k (MeV)", &f);
    for (i, t) in trajs.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        // Split where the trajectory leaves the window.
        let mut run: Vec<(f64, f64)> = Vec::new();
        for p in &t.points {
            if inside(p.k) {
                run.push((p.k.re, p.k.im));
            } else {
                polyline(&mut out, &f, &run, color, i % 2 == 1);
                run.clear();
            }
        }
        polyline(&mut out, &f, &run, color, i % 2 == 1);
        for p in t.points.iter().filter(|p| inside(p.k)) {
            let q = p.alpha / PI;
            if (q - q.round()).abs() > 1e-12 {
                continue;
            }
            let filled = (q.round() as i64).rem_euclid(2) == 0;
            let fill = if filled { color } else { "white" };
            let _ = writeln!(
                out,
                r#"<circle cx="{:.3}" cy="{:.3}" r="4" fill="{fill}" stroke="{color}" stroke-width="1.4"/>"#,
                f.x(p.k.re),
                f.y(p.k.im)
            );
        }
    }
    for z in fixed_zeros.iter().filter(|z| z.im >= f.y0 && z.im <= f.y1 && z.re >= f.x0 && z.re <= f.x1) {
        let (x, y) = (f.x(z.re), f.y(z.im));
        let _ = writeln!(
            out,
            r#"<path d="M{:.3},{:.3} L{:.3},{:.3} M{:.3},{:.3} L{:.3},{:.3}" stroke="black" stroke-width="1.5"/>"#,
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
    out.push_str("</svg>\n");
    out
}

/// `kappa` versus `Ubar`, with collisions marked by open circles.
pub fn flows_svg(title: &str, r: &SweepResult) -> String {
    let ks = r.flows.iter().flat_map(|fl| fl.kappa.iter().flatten().copied());
    let f = Frame::fit(r.ubar.iter().copied(), ks);
    let mut out = String::new();
    open(&mut out, title, "Ubar (MeV)", "kappa = Im k (MeV)", &f);
    for (i, fl) in r.flows.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut run = Vec::new();
        for (u, k) in r.ubar.iter().zip(&fl.kappa) {
            match k {
                Some(k) => run.push((*u, *k)),
                None => {
                    polyline(&mut out, &f, &run, color, false);
                    run.clear();
                }
            }
        }
        polyline(&mut out, &f, &run, color, false);
    }
    for e in &r.events {
        let ubar = if e.alpha_critical == 0.0 { e.u_critical } else { -e.u_critical };
        let _ = writeln!(
            out,
            r#"<circle cx="{:.3}" cy="{:.3}" r="5" fill="none" stroke="black" stroke-width="1.5"/>"#,
            f.x(ubar),
            f.y(e.k_critical.im)
        );
    }
    out.push_str("</svg>\n");
    out
}
