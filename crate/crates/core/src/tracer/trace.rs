use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::seed::LabelBook;
use super::{LabelAt, Periodicity, PhasePoint, PoleLabel, TraceError, Trajectory};
use crate::potentials::{PoleCondition, PotentialSpec};
use crate::rootfind::{refine_root_with, scale_radius, AnalyticFunction, RefineOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceOptions {
    pub step_min: f64,
    pub step_max: f64,
    /// Closure tolerance relative to `max(1, |k|)`.
    pub tol_close: f64,
    /// Open trajectories are truncated once `|k|` exceeds this (MeV).
    pub cutoff: f64,
    /// Normalized corrector residual bound.
    pub tol_residual: f64,
    /// Corrector step tolerance relative to `max(1, |k|)`.
    pub newton_tol: f64,
    /// Maximal `alpha` extent traced in each direction of an open trajectory.
    pub max_extent: f64,
    /// Relative distance within which a landmark pole takes a book label.
    pub label_tol: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            step_min: 1e-5,
            step_max: 0.05,
            tol_close: 1e-6,
            cutoff: 600.0,
            tol_residual: 1e-10,
            newton_tol: 1e-11,
            max_extent: 12.0 * PI,
            label_tol: 1e-6,
        }
    }
}

/// Shoelace area of the closed polygon through `points`.
pub fn signed_area(points: &[PhasePoint]) -> f64 {
    let n = points.len();
    if n < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..n {
        let a = points[i].k;
        let b = points[(i + 1) % n].k;
        s += a.re * b.im - b.re * a.im;
    }
    0.5 * s
}

/// Traces poles of one potential, naming landmark members from a label book.
#[derive(Debug, Clone)]
pub struct Tracer {
    pub spec: PotentialSpec,
    pub opts: TraceOptions,
    pub book: LabelBook,
}

/// Derivative data at an accepted point.
#[derive(Debug, Clone, Copy)]
struct Local {
    dp: Complex64,
    sep: f64,
    /// Nearest other root from the quadratic model, `k - 2 D'/D''`.
    partner: Option<Complex64>,
}

struct Walk {
    points: Vec<PhasePoint>,
    cut: bool,
}

fn is_landmark(alpha: f64) -> bool {
    let q = alpha / PI;
    (q - q.round()).abs() < 1e-12
}

impl Tracer {
    /// Tracer whose label book covers indices up to `n_label`.
    pub fn new(spec: PotentialSpec, opts: TraceOptions, n_label: u32) -> Result<Self, TraceError> {
        let book = LabelBook::new(&spec, n_label)?;
        Ok(Self { spec, opts, book })
    }

    pub fn with_book(spec: PotentialSpec, opts: TraceOptions, book: LabelBook) -> Self {
        Self { spec, opts, book }
    }

    fn at(&self, alpha: f64) -> PoleCondition {
        PoleCondition::new(self.spec, alpha)
    }

    fn local(&self, k: Complex64, alpha: f64) -> Result<Local, TraceError> {
        let f = self.at(alpha);
        let h = 1e-3 * k.norm().max(1.0);
        let d0 = f.eval(k)?;
        let dpl = f.eval(k + h)?;
        let dmi = f.eval(k - h)?;
        let dp = (dpl - dmi) / (2.0 * h);
        let dpp = (dpl - 2.0 * d0 + dmi) / (h * h);
        let cap = k.norm().max(1.0);
        let sep = if dpp.norm() > 0.0 { (2.0 * dp.norm() / dpp.norm()).min(cap) } else { cap };
        let partner = (dpp.norm() > 0.0).then(|| k - 2.0 * dp / dpp);
        Ok(Local { dp, sep, partner })
    }

    fn tangent(&self, k: Complex64, alpha: f64, dp: Complex64) -> Result<Complex64, TraceError> {
        let ha = 1e-6;
        let da = (self.at(alpha + ha).eval(k)? - self.at(alpha - ha).eval(k)?) / (2.0 * ha);
        Ok(-da / dp)
    }

    fn predict(&self, hist: &[PhasePoint], alpha: f64, local: Local) -> Result<Complex64, TraceError> {
        let n = hist.len();
        let last = hist[n - 1];
        Ok(match n {
            1 => last.k + self.tangent(last.k, last.alpha, local.dp)? * (alpha - last.alpha),
            2 => {
                let p = hist[0];
                last.k + (last.k - p.k) * ((alpha - last.alpha) / (last.alpha - p.alpha))
            }
            _ => {
                let (p0, p1, p2) = (hist[n - 3], hist[n - 2], last);
                let l0 = (alpha - p1.alpha) * (alpha - p2.alpha) / ((p0.alpha - p1.alpha) * (p0.alpha - p2.alpha));
                let l1 = (alpha - p0.alpha) * (alpha - p2.alpha) / ((p1.alpha - p0.alpha) * (p1.alpha - p2.alpha));
                let l2 = (alpha - p0.alpha) * (alpha - p1.alpha) / ((p2.alpha - p0.alpha) * (p2.alpha - p1.alpha));
                p0.k * l0 + p1.k * l1 + p2.k * l2
            }
        })
    }

    fn nearest_fixed_zero(&self, k: Complex64) -> Option<Complex64> {
        if !self.spec.family.has_fixed_zeros() {
            return None;
        }
        let n = (-k.im / self.spec.half_inverse_range()).round().max(1.0);
        Some(self.spec.fixed_zero(n as u32))
    }

    /// Near a close pair of roots the pole can move further than half the pair
    /// separation in one floor step. Accept `new` if it is a root distinct from
    /// the partner's continuation and pairing it with `old` beats the swap.
    fn pair_matches(&self, old: Complex64, new: Complex64, alpha: f64, local: Local, ropts: &RefineOptions) -> bool {
        let Some(p0) = local.partner else { return false };
        if (p0 - old).norm() > 2.0 * local.sep {
            return false;
        }
        let Ok(p1) = refine_root_with(&self.at(alpha), p0, ropts) else { return false };
        let distinct = (p1.k - new).norm() > 1e-6 * new.norm().max(1.0);
        distinct && (new - old).norm() + (p1.k - p0).norm() < (new - p0).norm() + (p1.k - old).norm()
    }

    /// Continue from the last point of `hist` towards `end`, landing exactly
    /// on every multiple of `pi` and on each of `extras`. Stops early once
    /// `|k| > hard_cut`.
    fn walk(
        &self,
        hist: &[PhasePoint],
        end: f64,
        extras: &[f64],
        hard_cut: f64,
        label: Option<PoleLabel>,
    ) -> Result<Walk, TraceError> {
        let o = &self.opts;
        let start = *hist.last().expect("non-empty history");
        let dir = if end >= start.alpha { 1.0 } else { -1.0 };
        let mut pts: Vec<PhasePoint> = hist[hist.len().saturating_sub(3)..].to_vec();
        let keep_from = pts.len() - 1;
        let mut local = self.local(start.k, start.alpha)?;
        let mut dps = vec![local.dp.norm()];
        let mut h = 0.25 * o.step_max;

        loop {
            let cur = *pts.last().unwrap();
            if (end - cur.alpha) * dir <= 0.0 {
                break;
            }
            let q = cur.alpha / PI;
            let j = if dir > 0.0 { (q + 1e-9).floor() + 1.0 } else { (q - 1e-9).ceil() - 1.0 };
            let mut target = cur.alpha + dir * h;
            let mut stops = vec![j * PI, end];
            stops.extend(extras.iter().copied().filter(|&x| (x - cur.alpha) * dir > 1e-12));
            for s in stops {
                if (s - target) * dir < 0.0 {
                    target = s;
                }
            }

            let pred = self.predict(&pts, target, local)?;
            let scale = local.dp.norm() * scale_radius(cur.k);
            let ropts = RefineOptions {
                tol: o.newton_tol,
                tol_residual: o.tol_residual,
                max_iter: 12,
                scale: Some(if scale > 0.0 { scale } else { 1.0 }),
            };
            let at_floor = h <= o.step_min * 1.000_001;
            let attempt = refine_root_with(&self.at(target), pred, &ropts).ok().and_then(|r| {
                let moved = (r.k - cur.k).norm();
                let off = (r.k - pred).norm();
                let mut ok = (r.iterations <= 5 || at_floor) && off <= 0.25 * local.sep && moved <= 0.5 * local.sep;
                if let Some(fz) = self.nearest_fixed_zero(cur.k) {
                    let turn = ((r.k - fz) / (cur.k - fz)).arg().abs();
                    ok &= turn <= 0.5;
                }
                if !ok && at_floor && r.iterations <= ropts.max_iter {
                    ok = self.pair_matches(cur.k, r.k, target, local, &ropts);
                }
                ok.then_some(r.k)
            });
            let accepted = match attempt {
                Some(k) => match self.local(k, target) {
                    Ok(l) => {
                        let mut sorted = dps.clone();
                        let mid = sorted.len() / 2;
                        let median = *sorted.select_nth_unstable_by(mid, f64::total_cmp).1;
                        if l.dp.norm() < 1e-4 * median && h > 4.0 * o.step_min {
                            h = (h / 4.0).max(o.step_min);
                            None
                        } else {
                            Some((k, l))
                        }
                    }
                    Err(_) => None,
                },
                None => None,
            };
            match accepted {
                Some((k, l)) => {
                    pts.push(PhasePoint { alpha: target, k });
                    local = l;
                    dps.push(l.dp.norm());
                    h = (h * 1.5).min(o.step_max);
                    if k.norm() > hard_cut {
                        return Ok(Walk { points: pts.split_off(keep_from + 1), cut: true });
                    }
                }
                None => {
                    if at_floor {
                        return Err(TraceError::StepUnderflow { alpha: cur.alpha, k: cur.k, label });
                    }
                    h = (h * 0.5).max(o.step_min);
                }
            }
        }
        Ok(Walk { points: pts.split_off(keep_from + 1), cut: false })
    }

    /// Trace the pole at `k0` over `alpha_span`, extending the span as far as
    /// needed to classify periodicity. Open trajectories are traced in both
    /// directions until they leave `|k| <= cutoff`.
    pub fn trace(
        &self,
        label: Option<PoleLabel>,
        k0: Complex64,
        alpha_span: (f64, f64),
    ) -> Result<Trajectory, TraceError> {
        let (a0, a1) = alpha_span;
        if !a0.is_finite() || !a1.is_finite() || a1 <= a0 {
            return Err(TraceError::Invalid(format!("alpha span ({a0}, {a1}) must be increasing")));
        }
        let o = self.opts;
        // Polish the start so every stored point meets the corrector bound.
        let ropts = RefineOptions { tol: o.newton_tol, tol_residual: o.tol_residual, ..Default::default() };
        let k0 = refine_root_with(&self.at(a0), k0, &ropts)?.k;
        let first = PhasePoint { alpha: a0, k: k0 };
        let extras = [a0 + 2.0 * PI, a0 + 4.0 * PI];
        let hard = 4.0 * o.cutoff;

        let mut points = vec![first];
        let close = |pts: &[PhasePoint], k: Complex64| {
            let extent = pts.iter().map(|p| (p.k - k0).norm()).fold(0.0, f64::max);
            (k - k0).norm() < (o.tol_close * k0.norm().max(1.0)).min(1e-3 * extent)
        };
        let mut periodicity = Periodicity::Open;
        let w = self.walk(&points, a0 + 2.0 * PI, &extras, hard, label)?;
        points.extend(w.points);
        if !w.cut {
            if close(&points, points.last().unwrap().k) {
                periodicity = Periodicity::TwoPi;
            } else {
                let w = self.walk(&points, a0 + 4.0 * PI, &extras, hard, label)?;
                points.extend(w.points);
                if !w.cut && close(&points, points.last().unwrap().k) {
                    periodicity = Periodicity::FourPi;
                }
            }
        }

        if periodicity == Periodicity::Open {
            let cut_at = |pts: &[PhasePoint]| pts.iter().position(|p| p.k.norm() > o.cutoff);
            if let Some(i) = cut_at(&points) {
                points.truncate(i + 1);
            } else {
                let w = self.walk(&points, a0 + o.max_extent, &[], o.cutoff, label)?;
                points.extend(w.points);
            }
            if k0.norm() <= o.cutoff {
                let w = self.walk(&[first], a0 - o.max_extent, &[], o.cutoff, label)?;
                let mut back = w.points;
                back.reverse();
                back.extend(points);
                points = back;
            }
        } else if points.last().unwrap().alpha < a1 {
            let w = self.walk(&points, a1, &[], f64::INFINITY, label)?;
            points.extend(w.points);
        }

        let mut traj = Trajectory {
            spec: self.spec,
            points,
            periodicity,
            labels: Vec::new(),
            windings: BTreeMap::new(),
        };
        let period_pts: Vec<PhasePoint> = match periodicity.period() {
            Some(p) => traj.points.iter().copied().filter(|q| q.alpha < a0 + p - 1e-9).collect(),
            None => traj.points.clone(),
        };
        for q in &period_pts {
            if is_landmark(q.alpha) {
                if let Some(l) = self.book.lookup(q.alpha, q.k, o.label_tol) {
                    traj.labels.push(LabelAt { alpha: q.alpha, label: l });
                }
            }
        }
        if periodicity != Periodicity::Open && self.spec.family.has_fixed_zeros() {
            traj.windings = windings(&self.spec, traj.first_period());
        }
        Ok(traj)
    }

    /// Trace the book pole `label` from its landmark (`0` for A, `pi` for R)
    /// over `alpha_span`, which must start at that landmark modulo `2 pi`.
    pub fn trace_label(&self, label: PoleLabel, alpha_span: (f64, f64)) -> Result<Trajectory, TraceError> {
        let k0 = self.book.get(label).ok_or(TraceError::MissingPole(label))?;
        let offset = (alpha_span.0 - label.sector.alpha()) / (2.0 * PI);
        if (offset - offset.round()).abs() > 1e-12 {
            return Err(TraceError::Invalid(format!(
                "span for {label} must start at {} mod 2 pi",
                label.sector.alpha()
            )));
        }
        self.trace(Some(label), k0, alpha_span)
    }
}

/// Winding numbers of a closed polygon around the fixed zeros it can enclose.
fn windings(spec: &PotentialSpec, pts: &[PhasePoint]) -> BTreeMap<u32, i64> {
    let mut out = BTreeMap::new();
    let deepest = pts.iter().map(|p| -p.k.im).fold(0.0, f64::max);
    let n_max = (deepest / spec.half_inverse_range()).ceil() as u32 + 1;
    for n in 1..=n_max {
        let fz = spec.fixed_zero(n);
        let mut total = 0.0;
        for i in 0..pts.len() {
            let a = pts[i].k - fz;
            let b = pts[(i + 1) % pts.len()].k - fz;
            total += (b / a).arg();
        }
        let w = (total / (2.0 * PI)).round() as i64;
        if w != 0 {
            out.insert(n, w);
        }
    }
    out
}

/// Trace the pole `start` of `spec` over `alpha_span` with default options.
pub fn trace(
    spec: &PotentialSpec,
    start: (PoleLabel, Complex64),
    alpha_span: (f64, f64),
) -> Result<Trajectory, TraceError> {
    let tracer = Tracer::new(*spec, TraceOptions::default(), start.0.n + 2)?;
    tracer.trace(Some(start.0), start.1, alpha_span)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::hulthen_pole_closed_form;

    #[test]
    fn hulthen_circle() {
        let spec = PotentialSpec::hulthen(10.0);
        let tracer = Tracer::new(spec, TraceOptions::default(), 3).unwrap();
        let t = tracer.trace_label(PoleLabel::a(1), (0.0, 2.0 * PI)).unwrap();
        assert_eq!(t.periodicity, Periodicity::TwoPi);
        assert_eq!(t.windings.get(&1), Some(&1));
        for p in &t.points {
            let want = hulthen_pole_closed_form(1, p.alpha, &spec).unwrap();
            assert!((p.k - want).norm() < 1e-6, "{} {} {}", p.alpha, p.k, want);
        }
        assert!(t.signed_area() > 0.0);
        let r = 940.0 / 140.0 * 10.0;
        assert!((t.signed_area() - PI * r * r).abs() < 1e-3 * PI * r * r);
    }

    #[test]
    fn shoelace_orientation() {
        let sq: Vec<PhasePoint> = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
            .iter()
            .map(|&(x, y)| PhasePoint { alpha: 0.0, k: Complex64::new(x, y) })
            .collect();
        assert!((signed_area(&sq) - 1.0).abs() < 1e-15);
    }
}
