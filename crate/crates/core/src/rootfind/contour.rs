use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::newton::{refine_root_with, RefineOptions, RootResult};
use super::{AnalyticFunction, RootError};

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub lo: Complex64,
    pub hi: Complex64,
}

impl Rectangle {
    /// Rectangle spanned by two opposite corners in any order.
    pub fn from_corners(a: Complex64, b: Complex64) -> Self {
        Self {
            lo: Complex64::new(a.re.min(b.re), a.im.min(b.im)),
            hi: Complex64::new(a.re.max(b.re), a.im.max(b.im)),
        }
    }

    pub fn width(&self) -> f64 {
        self.hi.re - self.lo.re
    }

    pub fn height(&self) -> f64 {
        self.hi.im - self.lo.im
    }

    pub fn center(&self) -> Complex64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, k: Complex64) -> bool {
        k.re >= self.lo.re && k.re <= self.hi.re && k.im >= self.lo.im && k.im <= self.hi.im
    }

    /// Counterclockwise corners starting at the lower left.
    fn corners(&self) -> [Complex64; 4] {
        [
            self.lo,
            Complex64::new(self.hi.re, self.lo.im),
            self.hi,
            Complex64::new(self.lo.re, self.hi.im),
        ]
    }

    /// Split the longer side at `frac`.
    fn split(&self, frac: f64) -> (Rectangle, Rectangle) {
        if self.width() >= self.height() {
            let x = self.lo.re + frac * self.width();
            (
                Rectangle { lo: self.lo, hi: Complex64::new(x, self.hi.im) },
                Rectangle { lo: Complex64::new(x, self.lo.im), hi: self.hi },
            )
        } else {
            let y = self.lo.im + frac * self.height();
            (
                Rectangle { lo: self.lo, hi: Complex64::new(self.hi.re, y) },
                Rectangle { lo: Complex64::new(self.lo.re, y), hi: self.hi },
            )
        }
    }
}

const MAX_DEPTH: u32 = 22;
const ACCEPT_JUMP: f64 = 0.35;

fn phase_step(a: Complex64, b: Complex64) -> f64 {
    (b / a).arg()
}

fn segment<F: AnalyticFunction + ?Sized>(
    f: &F,
    za: Complex64,
    zb: Complex64,
    da: Complex64,
    db: Complex64,
    depth: u32,
) -> Result<f64, RootError> {
    let jump = phase_step(da, db);
    if depth >= MAX_DEPTH {
        if jump.abs() > PI / 2.0 {
            return Err(RootError::ContourTooCoarse { jump, near: 0.5 * (za + zb) });
        }
        return Ok(jump);
    }
    let zm = 0.5 * (za + zb);
    let dm = f.eval(zm)?;
    let (j1, j2) = (phase_step(da, dm), phase_step(dm, db));
    if jump.abs() < ACCEPT_JUMP && (j1 + j2 - jump).abs() < 1e-3 {
        return Ok(j1 + j2);
    }
    Ok(segment(f, za, zm, da, dm, depth + 1)? + segment(f, zm, zb, dm, db, depth + 1)?)
}

/// Winding number of `D` around 0 along the rectangle boundary.
pub fn count_zeros_in_rectangle<F: AnalyticFunction + ?Sized>(
    f: &F,
    rect: &Rectangle,
    samples_per_edge: usize,
) -> Result<i64, RootError> {
    let n = samples_per_edge.max(1);
    let c = rect.corners();
    let mut total = 0.0;
    for e in 0..4 {
        let (a, b) = (c[e], c[(e + 1) % 4]);
        let mut zp = a;
        let mut dp = f.eval(a)?;
        for j in 1..=n {
            let z = if j == n { b } else { a + (b - a) * (j as f64 / n as f64) };
            let d = f.eval(z)?;
            total += segment(f, zp, z, dp, d, 0)?;
            zp = z;
            dp = d;
        }
    }
    let turns = total / (2.0 * PI);
    if (turns - turns.round()).abs() > 0.05 {
        return Err(RootError::NonIntegerWinding { turns });
    }
    Ok(turns.round() as i64)
}

const CUT_FRACTIONS: [f64; 4] = [0.537_1, 0.462_9, 0.613_3, 0.386_7];

/// Every zero inside the rectangle, by recursive subdivision with
/// argument-principle counts and Newton refinement. A cluster that cannot be
/// separated below `1e-9 max(1, |k|)` is returned as one root with the
/// cluster size as multiplicity hint.
pub fn locate_zeros_in_rectangle<F: AnalyticFunction + ?Sized>(
    f: &F,
    rect: &Rectangle,
    samples_per_edge: usize,
    opts: &RefineOptions,
) -> Result<Vec<RootResult>, RootError> {
    let total = count_zeros_in_rectangle(f, rect, samples_per_edge)?;
    let mut out = Vec::new();
    locate(f, rect, total, samples_per_edge, opts, 0, &mut out)?;
    out.sort_by(|a, b| a.k.re.total_cmp(&b.k.re).then(a.k.im.total_cmp(&b.k.im)));
    Ok(out)
}

fn locate<F: AnalyticFunction + ?Sized>(
    f: &F,
    rect: &Rectangle,
    count: i64,
    samples: usize,
    opts: &RefineOptions,
    depth: u32,
    out: &mut Vec<RootResult>,
) -> Result<(), RootError> {
    if count <= 0 {
        return Ok(());
    }
    let size = rect.width().max(rect.height());
    let tiny = size < 1e-9 * rect.center().norm().max(1.0);
    if count == 1 || tiny {
        if let Ok(r) = refine_root_with(f, rect.center(), opts) {
            if rect.contains(r.k) {
                let mut r = r;
                if count > 1 {
                    r.multiplicity_hint = count as u32;
                }
                out.push(r);
                return Ok(());
            }
        }
        if tiny {
            return Err(RootError::NonConvergence { last: rect.center(), iterations: opts.max_iter });
        }
    }
    if depth > 60 {
        return Err(RootError::NonConvergence { last: rect.center(), iterations: opts.max_iter });
    }
    let sub_samples = (samples / 2).max(8);
    let mut last_err = None;
    for frac in CUT_FRACTIONS {
        let (a, b) = rect.split(frac);
        match (
            count_zeros_in_rectangle(f, &a, sub_samples),
            count_zeros_in_rectangle(f, &b, sub_samples),
        ) {
            (Ok(na), Ok(nb)) if na + nb == count => {
                locate(f, &a, na, sub_samples, opts, depth + 1, out)?;
                locate(f, &b, nb, sub_samples, opts, depth + 1, out)?;
                return Ok(());
            }
            (Err(e), _) | (_, Err(e)) => last_err = Some(e),
            _ => {}
        }
    }
    Err(last_err.unwrap_or(RootError::NonConvergence { last: rect.center(), iterations: 0 }))
}
