//! Continuation of imaginary-axis roots `k = i kappa` in the real strength.
//!
//! Each root is followed from `U_tiny` with a tangent predictor and a real
//! Newton corrector. Steps are rejected when a corrected root leaves its
//! prediction by more than a quarter of the local root spacing, when roots
//! merge, or when their ordering disagrees with the predicted ordering.
//! A rejected step whose neighbouring pair has lost its sign change is a
//! head-on collision; it is bisected on the extremum value between the pair.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{PoleLabel, Sector, TraceError};
use crate::potentials::{series_first_order_offset, PoleCondition, PotentialSpec};
use crate::rootfind::{
    refine_root_with, solve_degeneracy, AnalyticFunction, DegeneracyOptions, RefineOptions,
};

/// Two axis roots meeting at `(ubar, kappa)` before leaving the axis as a
/// resonance/antiresonance pair, or (`arrival`) such a pair landing back on
/// the axis and splitting into two axis roots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisCollision {
    /// Member with the smaller index; continues as the resonance after a
    /// departure and as the upper root after an arrival.
    pub first: PoleLabel,
    pub second: PoleLabel,
    /// Strength magnitude `|Ubar|` at the collision.
    pub u: f64,
    pub kappa: f64,
    pub residual: f64,
    pub bracket: (f64, f64),
    #[serde(default)]
    pub arrival: bool,
}

/// Result of following the axis roots of one sector.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisContinuation {
    pub sector: Sector,
    /// Recorded strength magnitudes `|Ubar|`.
    pub u: Vec<f64>,
    pub labels: Vec<PoleLabel>,
    /// `kappa[i][j]`: root `labels[i]` at `u[j]`, `None` once off the axis.
    pub kappa: Vec<Vec<Option<f64>>>,
    pub collisions: Vec<AxisCollision>,
    pub u_start: f64,
}

impl AxisContinuation {
    pub fn final_kappa(&self, label: PoleLabel) -> Option<f64> {
        let i = self.labels.iter().position(|l| *l == label)?;
        *self.kappa[i].last()?
    }

    /// Latest departure involving `label`.
    pub fn collision_of(&self, label: PoleLabel) -> Option<&AxisCollision> {
        self.collisions.iter().rev().find(|c| !c.arrival && (c.first == label || c.second == label))
    }
}

struct Axis<'a> {
    spec: &'a PotentialSpec,
    sign: f64,
}

impl Axis<'_> {
    fn f(&self, kappa: f64, u: f64) -> Option<f64> {
        self.spec.axis_function(kappa, self.sign * u).ok().filter(|v| v.is_finite())
    }

    fn dk(&self, kappa: f64, u: f64) -> Option<f64> {
        let h = 1e-6 * kappa.abs().max(1.0);
        Some((self.f(kappa + h, u)? - self.f(kappa - h, u)?) / (2.0 * h))
    }

    fn slope(&self, kappa: f64, u: f64) -> Option<f64> {
        let hu = 1e-6 * u;
        let du = (self.f(kappa, u + hu)? - self.f(kappa, u - hu)?) / (2.0 * hu);
        let dk = self.dk(kappa, u)?;
        let s = -du / dk;
        s.is_finite().then_some(s)
    }

    fn newton(&self, kappa0: f64, u: f64) -> Option<(f64, usize)> {
        let mut k = kappa0;
        let mut fk = self.f(k, u)?;
        for it in 1..=20 {
            if fk == 0.0 {
                return Some((k, it));
            }
            let d = self.dk(k, u)?;
            if d == 0.0 || !d.is_finite() {
                return None;
            }
            let step = fk / d;
            let mut lambda = 1.0;
            let (kn, fn_) = loop {
                let t = k - lambda * step;
                match self.f(t, u) {
                    Some(v) if v.abs() < fk.abs() || lambda < 1e-2 => break (t, v),
                    _ => lambda *= 0.5,
                }
            };
            let moved = (kn - k).abs();
            k = kn;
            fk = fn_;
            if moved < 1e-12 * k.abs().max(1.0) {
                return Some((k, it));
            }
        }
        None
    }

    /// Stationary point of the axis function in `[lo, hi]`, its value and
    /// curvature. `None` unless the derivative changes sign in the interval.
    fn extremum(&self, lo: f64, hi: f64, u: f64) -> Option<(f64, f64, f64)> {
        let (mut a, mut b) = (lo, hi);
        let da = self.dk(a, u)?;
        let db = self.dk(b, u)?;
        if da == 0.0 || (da > 0.0) == (db > 0.0) {
            return None;
        }
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if m == a || m == b {
                break;
            }
            let dm = self.dk(m, u)?;
            if (dm > 0.0) == (da > 0.0) {
                a = m;
            } else {
                b = m;
            }
        }
        let ke = 0.5 * (a + b);
        let h = 1e-3 * (hi - lo).max(1e-9);
        let e = self.f(ke, u)?;
        let fpp = (self.f(ke + h, u)? - 2.0 * e + self.f(ke - h, u)?) / (h * h);
        Some((ke, e, fpp))
    }

    /// Positive once the pair around `[lo, hi]` has left the axis.
    fn pair_gap_sign(&self, lo: f64, hi: f64, u: f64) -> Option<f64> {
        let (_, e, fpp) = self.extremum(lo, hi, u)?;
        Some(e * fpp.signum())
    }

    /// Extremum left behind by a departed pair: a local minimum of `|f|`
    /// with `sign f = curv` while the pair is off the axis. A small window
    /// around `center` is tried first (the only place a landing can be
    /// seen, flagged `true`); otherwise the whole of `span` is scanned for
    /// off-axis minima and the one nearest `center` wins.
    fn shadow(&self, center: f64, bounds: (f64, f64), span: (f64, f64), curv: f64, u: f64) -> Option<(f64, f64, f64, bool)> {
        let w = self.spec.half_inverse_range();
        for d in [0.01, 0.04].map(|x| x * w) {
            let lo = (center - d).max(bounds.0);
            let hi = (center + d).min(bounds.1);
            if lo >= hi {
                continue;
            }
            if let Some((k, e, fpp)) = self.extremum(lo, hi, u).filter(|x| x.2 * curv > 0.0) {
                return Some((k, e, fpp, true));
            }
        }
        let step = 0.02 * w;
        let n = ((span.1 - span.0) / step).ceil() as usize;
        let xs: Vec<f64> = (0..=n).map(|i| span.0 + 0.37 * step + i as f64 * step).collect();
        let vs: Vec<f64> = xs.iter().map(|&x| self.f(x, u).unwrap_or(f64::NAN)).collect();
        (1..n)
            .filter(|&i| {
                let same = (vs[i - 1] > 0.0) == (vs[i] > 0.0) && (vs[i] > 0.0) == (vs[i + 1] > 0.0);
                same && (vs[i] > 0.0) == (curv > 0.0) && vs[i].abs() < vs[i - 1].abs() && vs[i].abs() < vs[i + 1].abs()
            })
            .filter_map(|i| self.extremum(xs[i - 1], xs[i + 1], u).filter(|x| x.2 * curv > 0.0 && x.1 * curv > 0.0))
            .min_by(|a, b| (a.0 - center).abs().total_cmp(&(b.0 - center).abs()))
            .map(|(k, e, fpp)| (k, e, fpp, false))
    }

    /// The two roots on either side of a landed shadow at `ke`, bracketed
    /// outward from the extremum and bisected.
    fn split(&self, ke: f64, e: f64, d: f64, bounds: (f64, f64), u: f64) -> Option<(f64, f64)> {
        let side = |dir: f64| -> Option<f64> {
            let limit = if dir > 0.0 { bounds.1 } else { bounds.0 };
            let mut near = ke;
            let mut step = d.max(1e-9 * ke.abs().max(1.0));
            loop {
                let far = (ke + dir * step).clamp(bounds.0, bounds.1);
                let v = self.f(far, u)?;
                if (v > 0.0) != (e > 0.0) {
                    let (mut a, mut b) = (near, far);
                    for _ in 0..200 {
                        let m = 0.5 * (a + b);
                        if m == a || m == b {
                            break;
                        }
                        if (self.f(m, u)? > 0.0) == (e > 0.0) {
                            a = m;
                        } else {
                            b = m;
                        }
                    }
                    return Some(0.5 * (a + b));
                }
                if far == limit || step > 0.04 * self.spec.half_inverse_range() {
                    return None;
                }
                near = far;
                step *= 2.0;
            }
        };
        let (hi, lo) = (side(1.0)?, side(-1.0)?);
        (hi > lo).then_some((hi, lo))
    }
}

/// A departed pair, followed through its shadow extremum until it lands.
#[derive(Debug, Clone, Copy)]
struct Shadow {
    upper: usize,
    lower: usize,
    kappa: f64,
    curv: f64,
    /// Found near `kappa` on the previous step.
    fresh: bool,
}

/// Nearest roots strictly above and below `kappa`, shrunk slightly.
fn bounds(kappa: f64, roots: &[f64]) -> (f64, f64) {
    let above = roots.iter().copied().filter(|&r| r > kappa).fold(f64::INFINITY, f64::min);
    let below = roots.iter().copied().filter(|&r| r < kappa).fold(f64::NEG_INFINITY, f64::max);
    let shrink = |r: f64| if r.is_finite() { 1e-3 * (r - kappa).abs() } else { 0.0 };
    (below + shrink(below), above - shrink(above))
}

#[derive(Debug, Clone, Copy)]
struct Track {
    label: PoleLabel,
    kappa: f64,
    slope: f64,
    active: bool,
}

/// Largest label index that must not be dropped silently.
fn required(n_track: u32) -> u32 {
    n_track.saturating_sub(2).max(1)
}

/// Follow the `n_track` axis roots of `sector` from `U_tiny` to `u_end`.
///
/// When `grid` is given the continuation lands exactly on each of its
/// (ascending, positive) strengths and records only there; otherwise every
/// accepted step is recorded. Roots with index above `n_track - 2` that get
/// lost (typically by colliding with an untracked deeper root) are dropped
/// silently; losing a lower one is an error naming it.
pub fn continue_axis(
    spec: &PotentialSpec,
    sector: Sector,
    u_end: f64,
    n_track: u32,
    grid: Option<&[f64]>,
) -> Result<AxisContinuation, TraceError> {
    if !spec.family.has_fixed_zeros() {
        return Err(TraceError::Invalid("axis homotopy needs fixed zeros".into()));
    }
    if !(u_end > 0.0 && u_end.is_finite()) {
        return Err(TraceError::Invalid(format!("bad strength {u_end}")));
    }
    let ax = Axis { spec, sign: sector.sign() };
    let w = spec.half_inverse_range();
    let mut u_start = 1e-3 * u_end;
    if let Some(g) = grid {
        if let Some(&g0) = g.iter().find(|&&x| x > 0.0) {
            u_start = u_start.min(g0);
        }
    }

    // Seeds from the first-order offset; raise U_tiny if the evaluator
    // cannot resolve the roots next to their fixed zeros.
    let mut tracks = Vec::new();
    'seed: for _ in 0..10 {
        tracks.clear();
        for n in 1..=n_track {
            let eps = series_first_order_offset(n, sector.alpha(), u_start, spec);
            let guess = -(n as f64) * w + w * eps.re;
            let Some((kappa, _)) = ax.newton(guess, u_start) else {
                u_start *= 3.0;
                continue 'seed;
            };
            let Some(slope) = ax.slope(kappa, u_start) else {
                u_start *= 3.0;
                continue 'seed;
            };
            tracks.push(Track { label: PoleLabel { sector, n }, kappa, slope, active: true });
        }
        let ordered = tracks.windows(2).all(|p| p[0].kappa > p[1].kappa);
        if ordered {
            break;
        }
        u_start *= 3.0;
    }
    if tracks.len() != n_track as usize || u_start >= u_end {
        return Err(TraceError::LostPole { label: PoleLabel { sector, n: 1 }, ubar: sector.sign() * u_start });
    }

    let mut out = AxisContinuation {
        sector,
        u: Vec::new(),
        labels: tracks.iter().map(|t| t.label).collect(),
        kappa: vec![Vec::new(); tracks.len()],
        collisions: Vec::new(),
        u_start,
    };
    let record = |out: &mut AxisContinuation, u: f64, tracks: &[Track]| {
        out.u.push(u);
        for (i, t) in tracks.iter().enumerate() {
            out.kappa[i].push(t.active.then_some(t.kappa));
        }
    };
    let grid: Vec<f64> = grid.map(|g| g.iter().copied().filter(|&x| x >= u_start).collect()).unwrap_or_default();
    let mut next_grid = 0;
    if grid.is_empty() {
        record(&mut out, u_start, &tracks);
    }
    while next_grid < grid.len() && grid[next_grid] <= u_start {
        record(&mut out, u_start, &tracks);
        next_grid += 1;
    }

    let h_max = (u_end / 60.0).min(0.5).max(u_start);
    let h_min = 1e-12 * u_end.max(1.0);
    let mut u = u_start;
    let mut h = u_start;
    let mut shadows: Vec<Shadow> = Vec::new();
    while u < u_end {
        let mut target = (u + h).min(u_end);
        if next_grid < grid.len() {
            target = target.min(grid[next_grid]);
        }
        let dh = target - u;
        let active: Vec<usize> = (0..tracks.len()).filter(|&i| tracks[i].active).collect();
        let pred: Vec<f64> = active.iter().map(|&i| tracks[i].kappa + tracks[i].slope * dh).collect();
        let mut new = vec![f64::NAN; active.len()];
        let mut failed = vec![false; active.len()];
        for (j, &p) in pred.iter().enumerate() {
            match ax.newton(p, target) {
                Some((kn, it)) if it <= 8 => new[j] = kn,
                _ => failed[j] = true,
            }
        }
        // Local spacing of predictions and current roots.
        for j in 0..active.len() {
            if failed[j] {
                continue;
            }
            let mut gap = f64::INFINITY;
            for m in 0..active.len() {
                if m != j {
                    gap = gap.min((pred[m] - pred[j]).abs());
                    gap = gap.min((tracks[active[m]].kappa - tracks[active[j]].kappa).abs());
                }
            }
            if (new[j] - pred[j]).abs() > 0.25 * gap {
                failed[j] = true;
            }
        }
        for j in 0..active.len() {
            for m in j + 1..active.len() {
                let same = (new[j] - new[m]).abs() <= 1e-9 * new[j].abs().max(1.0);
                let swapped = (new[j] - new[m]).signum() != (pred[j] - pred[m]).signum();
                if !failed[j] && !failed[m] && (same || swapped) {
                    failed[j] = true;
                    failed[m] = true;
                }
            }
        }

        if !failed.iter().any(|&x| x) {
            // Departed pairs landing back on the axis within this step.
            let mut landed = Vec::new();
            let mut retry = false;
            for (si, sh) in shadows.iter_mut().enumerate() {
                let b = bounds(sh.kappa, &new);
                let span = new.iter().fold((sh.kappa, sh.kappa), |(lo, hi), &r| (lo.min(r), hi.max(r)));
                let span = (span.0 - w, span.1 + w);
                let Some((ke, e, fpp, local)) = ax.shadow(sh.kappa, b, span, sh.curv, target) else {
                    sh.fresh = false;
                    continue;
                };
                if e * sh.curv > 0.0 {
                    sh.kappa = ke;
                    sh.fresh = true;
                    continue;
                }
                if !(local && sh.fresh) {
                    continue;
                }
                let b = bounds(ke, &new);
                let d = 0.5 * (2.0 * (e / fpp).abs()).sqrt();
                match ax.split(ke, e, d, b, target) {
                    Some((hi, lo)) => {
                        let (k0, curv) = (sh.kappa, sh.curv);
                        let probe = |m: f64| {
                            let center = k0 + (ke - k0) * (m - u) / (target - u);
                            ax.shadow(center, b, b, curv, m).map(|x| (x.3 && x.1 * curv <= 0.0, x.0))
                        };
                        let (a, c) = (tracks[sh.upper].label, tracks[sh.lower].label);
                        let col = locate_collision(spec, sector, a, c, (u, target), ke, true, probe);
                        landed.push((si, hi, lo, col));
                    }
                    _ => {
                        retry = true;
                        break;
                    }
                }
            }
            if retry {
                h *= 0.5;
                if h < h_min {
                    let label = tracks[shadows[0].upper].label;
                    return Err(TraceError::LostPole { label, ubar: sector.sign() * u });
                }
                continue;
            }
            for (j, &i) in active.iter().enumerate() {
                tracks[i].kappa = new[j];
                tracks[i].slope = ax.slope(new[j], target).unwrap_or(tracks[i].slope);
            }
            for &(si, hi, lo, col) in landed.iter().rev() {
                let sh = shadows.remove(si);
                for (i, k) in [(sh.upper, hi), (sh.lower, lo)] {
                    tracks[i] = Track { kappa: k, slope: ax.slope(k, target).unwrap_or(0.0), active: true, ..tracks[i] };
                }
                out.collisions.push(col);
            }
            u = target;
            if grid.is_empty() {
                record(&mut out, u, &tracks);
            } else if next_grid < grid.len() && u == grid[next_grid] {
                record(&mut out, u, &tracks);
                next_grid += 1;
            }
            h = (h * 1.5).min(h_max);
            continue;
        }

        // Did a neighbouring pair leave the axis between u and target?
        let mut order: Vec<usize> = active.clone();
        order.sort_by(|&a, &b| tracks[b].kappa.total_cmp(&tracks[a].kappa));
        let mut collided = false;
        for p in order.windows(2) {
            let (ia, ib) = (p[0], p[1]);
            let ja = active.iter().position(|&x| x == ia).unwrap_or(0);
            let jb = active.iter().position(|&x| x == ib).unwrap_or(0);
            if !failed[ja] && !failed[jb] {
                continue;
            }
            let (ka, kb) = (tracks[ia].kappa, tracks[ib].kappa);
            let gap = ka - kb;
            let (lo, hi) = (kb - 0.25 * gap, ka + 0.25 * gap);
            let Some(after) = ax.pair_gap_sign(lo, hi, target) else { continue };
            if after <= 0.0 {
                continue;
            }
            let probe = |m: f64| ax.extremum(lo, hi, m).map(|(k, e, fpp)| (e * fpp.signum() > 0.0, k));
            let (la, lb) = (tracks[ia].label, tracks[ib].label);
            let c = locate_collision(spec, sector, la, lb, (u, target), 0.5 * (lo + hi), false, probe);
            tracks[ia].active = false;
            tracks[ib].active = false;
            if let Some((ke, _, fpp)) = ax.extremum(lo, hi, target) {
                let (upper, lower) = if la.n < lb.n { (ia, ib) } else { (ib, ia) };
                shadows.push(Shadow { upper, lower, kappa: ke, curv: fpp.signum(), fresh: true });
            }
            out.collisions.push(c);
            collided = true;
            break;
        }
        if collided {
            continue;
        }

        // Drop deep roots that lost their way; they only guard the others.
        let mut dropped = false;
        for (j, &i) in active.iter().enumerate() {
            if failed[j] && tracks[i].label.n > required(n_track) && h <= 1e-6 * u_end {
                tracks[i].active = false;
                dropped = true;
            }
        }
        if dropped {
            continue;
        }
        h *= 0.5;
        if h < h_min {
            let j = failed.iter().position(|&x| x).unwrap_or(0);
            let label = tracks[active[j]].label;
            return Err(TraceError::LostPole { label, ubar: sector.sign() * u });
        }
    }
    // Grid points at the very end (u_end itself).
    while next_grid < grid.len() {
        record(&mut out, u, &tracks);
        next_grid += 1;
    }
    Ok(out)
}

/// Bisect the strength bracket on `probe(u) = Some((past, kappa))`, which
/// reports whether the event has happened by `u`.
#[allow(clippy::too_many_arguments)]
fn locate_collision(
    spec: &PotentialSpec,
    sector: Sector,
    a: PoleLabel,
    b: PoleLabel,
    (u_lo, u_hi): (f64, f64),
    kappa_guess: f64,
    arrival: bool,
    probe: impl Fn(f64) -> Option<(bool, f64)>,
) -> AxisCollision {
    let (mut lo, mut hi) = (u_lo, u_hi);
    while hi - lo > 1e-11 * hi.max(1.0) {
        let m = 0.5 * (lo + hi);
        if m == lo || m == hi {
            break;
        }
        match probe(m) {
            Some((true, _)) => hi = m,
            Some(_) => lo = m,
            None => break,
        }
    }
    let u_mid = 0.5 * (lo + hi);
    let kappa = probe(u_mid).map(|x| x.1).unwrap_or(kappa_guess);
    let (first, second) = if a.n < b.n { (a, b) } else { (b, a) };
    let mut c = AxisCollision { first, second, u: u_mid, kappa, residual: f64::NAN, bracket: (lo, hi), arrival };
    let opts = DegeneracyOptions { free_alpha: false, ..Default::default() };
    let seed = Complex64::new(0.0, kappa);
    match solve_degeneracy(spec, seed, sector.alpha(), u_mid, &opts) {
        Ok(p) if (p.u - u_mid).abs() < 1e-6 * u_mid.max(1.0) && p.k.re.abs() < 1e-6 => {
            c.u = p.u;
            c.kappa = p.k.im;
            c.residual = p.residual;
        }
        Ok(p) => c.residual = degeneracy_residual(spec, seed, sector.alpha(), u_mid).unwrap_or(p.residual),
        Err(_) => c.residual = degeneracy_residual(spec, seed, sector.alpha(), u_mid).unwrap_or(f64::NAN),
    }
    c
}

pub(crate) fn degeneracy_residual(spec: &PotentialSpec, k: Complex64, alpha: f64, u: f64) -> Option<f64> {
    crate::rootfind::degeneracy_residual(spec, k, alpha, u).ok()
}

/// Follow the resonance born at `col` (the member with `Re k > 0`) in the
/// strength from the collision up to `u_target`.
pub fn continue_resonance(
    spec: &PotentialSpec,
    sector: Sector,
    col: &AxisCollision,
    u_target: f64,
) -> Result<Complex64, TraceError> {
    let alpha = sector.alpha();
    let at = |u: f64| PoleCondition::new(spec.with_u(u), alpha);
    let kc = Complex64::new(0.0, col.kappa);
    let uc = col.bracket.1;
    if u_target <= uc {
        return Err(TraceError::Invalid(format!("strength {u_target} precedes the collision at {uc}")));
    }
    // Local model D ~ D_U (u - uc) + D_kk (k - kc)^2 / 2.
    let hk = 1e-3 * kc.norm().max(1.0);
    let hu = 1e-6 * uc.max(1.0);
    let f0 = at(uc);
    let d0 = f0.eval(kc)?;
    let dkk = (f0.eval(kc + hk)? - 2.0 * d0 + f0.eval(kc - hk)?) / (hk * hk);
    let du = (at(uc + hu).eval(kc)? - at(uc - hu).eval(kc)?) / (2.0 * hu);
    let mut delta = (1e-6 * uc.max(1.0)).min(0.5 * (u_target - uc));
    let mut k = Complex64::new(0.0, 0.0);
    let mut u = uc;
    for _ in 0..30 {
        let x = (-2.0 * du * delta / dkk).sqrt();
        let guess = if x.re >= 0.0 { kc + x } else { kc - x };
        let opts = RefineOptions { tol: 1e-12, max_iter: 40, ..Default::default() };
        match refine_root_with(&at(uc + delta), guess, &opts) {
            Ok(r) if r.k.re > 0.0 && (r.k - guess).norm() < 0.5 * x.norm() => {
                k = r.k;
                u = uc + delta;
                break;
            }
            _ => delta *= 4.0,
        }
        if uc + delta >= u_target {
            break;
        }
    }
    if u == uc {
        return Err(TraceError::LostPole { label: col.first, ubar: sector.sign() * uc });
    }

    let mut hist: Vec<(f64, Complex64)> = vec![(u, k)];
    let mut h = delta;
    let h_max = (u_target / 60.0).min(0.5);
    while u < u_target {
        let target = (u + h).min(u_target);
        let f = at(target);
        let pred = match hist.len() {
            1 => {
                let g = at(u);
                let dk = g.eval_derivative(k)?;
                let hu = 1e-6 * u.max(1.0);
                let dd = (at(u + hu).eval(k)? - at(u - hu).eval(k)?) / (2.0 * hu);
                k - dd / dk * (target - u)
            }
            _ => {
                let (u1, k1) = hist[hist.len() - 2];
                k + (k - k1) * ((target - u) / (u - u1))
            }
        };
        let sep = {
            let g = at(u);
            let h2 = 1e-3 * k.norm().max(1.0);
            let d = g.eval(k)?;
            let dp = g.eval_derivative(k)?;
            let dpp = (g.eval(k + h2)? - 2.0 * d + g.eval(k - h2)?) / (h2 * h2);
            (2.0 * dp.norm() / dpp.norm()).min(k.re.abs() * 2.0)
        };
        let opts = RefineOptions { tol: 1e-12, max_iter: 12, ..Default::default() };
        let ok = match refine_root_with(&f, pred, &opts) {
            Ok(r) if r.iterations <= 6 && (r.k - pred).norm() <= 0.25 * sep && r.k.re > 0.0 => Some(r.k),
            _ => None,
        };
        match ok {
            Some(kn) => {
                k = kn;
                u = target;
                hist.push((u, k));
                h = (h * 1.5).min(h_max.max(delta));
            }
            None => {
                h *= 0.5;
                if h < 1e-12 * u_target.max(1.0) {
                    return Err(TraceError::LostPole { label: col.first, ubar: sector.sign() * u });
                }
            }
        }
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hulthen_axis_roots_follow_straight_lines() {
        let spec = PotentialSpec::hulthen(1.0);
        let c = continue_axis(&spec, Sector::R, 60.0, 6, Some(&[10.0, 30.0, 60.0])).unwrap();
        assert!(c.collisions.is_empty());
        for (i, l) in c.labels.iter().enumerate() {
            let n = l.n as f64;
            for (j, &u) in c.u.iter().enumerate() {
                let want = 70.0 * (-spec.strength_factor() * u / n - n);
                let got = c.kappa[i][j].unwrap();
                assert!((got - want).abs() < 1e-8 * want.abs(), "{l} at {u}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn departed_pair_lands_back_on_axis() {
        let spec = PotentialSpec::generalized_hulthen(1.0, -0.95);
        let c = continue_axis(&spec, Sector::R, 25.0, 8, Some(&[20.0, 25.0])).unwrap();
        let kinds: Vec<(u32, u32, bool)> = c.collisions.iter().map(|x| (x.first.n, x.second.n, x.arrival)).collect();
        assert_eq!(kinds, [(1, 2, false), (1, 2, true), (2, 3, false)]);
        assert!((c.collisions[1].u - 19.5394).abs() < 1e-3, "{:?}", c.collisions[1]);
        assert!(c.collisions.iter().all(|x| x.residual < 1e-9));
        // Back on the axis at U = 20, upper root keeps the smaller index.
        let (k1, k2) = (c.kappa[0][0].unwrap(), c.kappa[1][0].unwrap());
        assert!(k1 > k2, "{k1} {k2}");
        assert_eq!(c.collision_of(PoleLabel::r(2)).map(|x| x.u), Some(c.collisions[2].u));
    }

    #[test]
    fn exponential_top_pair_collides() {
        let spec = PotentialSpec::exponential(1.0);
        let c = continue_axis(&spec, Sector::R, 6.0, 6, None).unwrap();
        assert_eq!(c.collisions.len(), 1);
        let col = c.collisions[0];
        assert_eq!((col.first, col.second), (PoleLabel::r(1), PoleLabel::r(2)));
        assert!((col.u - 4.1897).abs() < 1e-3, "{}", col.u);
        assert!(col.residual < 1e-9, "{}", col.residual);
        let k = continue_resonance(&spec, Sector::R, &col, 6.0).unwrap();
        assert!(k.re > 0.0 && k.im < 0.0);
        let d = spec.pole_condition_at(k, std::f64::consts::PI, 6.0).unwrap();
        assert!(d.norm() < 1e-12, "{d}");
    }
}
