use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::axis::{continue_axis, degeneracy_residual};
use super::{EventKind, EventRecord, PoleLabel, Sector, TraceError};
use crate::potentials::{Family, PotentialSpec};
use crate::rootfind::real::sign_changes;
use crate::rootfind::{solve_degeneracy, DegeneracyOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    /// Output grid spacing in `Ubar` (MeV).
    pub step: f64,
    /// Square well: `kappa` scan spacing (MeV) and window half-width.
    pub scan_step: f64,
    pub cutoff: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { step: 0.1, scan_step: 0.25, cutoff: 600.0 }
    }
}

/// `kappa(Ubar)` of one axis pole; `None` where it is off the axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisFlow {
    pub label: PoleLabel,
    pub kappa: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub ubar: Vec<f64>,
    pub flows: Vec<AxisFlow>,
    pub events: Vec<EventRecord>,
}

fn grid(a: f64, b: f64, step: f64) -> Vec<f64> {
    let n = (((b - a) / step).ceil() as usize).max(1);
    (0..=n).map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 }).collect()
}

/// Axis-root flows over `Ubar in [a, b]` with `alpha = 0` for `Ubar > 0` and
/// `alpha = pi` for `Ubar < 0`.
///
/// Exponential-tail families follow `A_1..A_{n_max}` and `R_1..R_{n_max}`
/// from `Ubar = 0` and report head-on collisions. The square well has no
/// homotopy origin: its axis roots are ranked by descending `kappa` at each
/// grid point (`n_max` ignored) and changes of the root count are reported
/// as collisions.
pub fn sweep_real_strength(
    spec: &PotentialSpec,
    ubar_range: (f64, f64),
    n_max: u32,
    opts: &SweepOptions,
) -> Result<SweepResult, TraceError> {
    let (a, b) = ubar_range;
    if !a.is_finite() || !b.is_finite() || b <= a || opts.step.is_nan() || opts.step <= 0.0 {
        return Err(TraceError::Invalid(format!("bad sweep range ({a}, {b}) or step {}", opts.step)));
    }
    if n_max == 0 {
        return Err(TraceError::Invalid("n_max must be at least 1".into()));
    }
    let ubar = grid(a, b, opts.step);
    if spec.family == Family::Square {
        return sweep_square(spec, ubar, opts);
    }

    let mut flows = Vec::new();
    let mut events = Vec::new();
    for sector in [Sector::R, Sector::A] {
        let mags: Vec<f64> = match sector {
            Sector::R => ubar.iter().filter(|&&x| x < 0.0).map(|x| -x).rev().collect(),
            Sector::A => ubar.iter().copied().filter(|&x| x > 0.0).collect(),
        };
        let mut per_label: Vec<Vec<Option<f64>>> = vec![Vec::new(); n_max as usize];
        let mut mags_done = Vec::new();
        if let Some(&top) = mags.last() {
            let cont = continue_axis(spec, sector, top, n_max + 4, Some(&mags))?;
            mags_done = cont.u.clone();
            for n in 1..=n_max {
                per_label[n as usize - 1] = cont.kappa[n as usize - 1].clone();
            }
            for c in cont.collisions.iter().filter(|c| c.first.n <= n_max) {
                let (kind, note) = if c.arrival {
                    (EventKind::AxisArrival, format!("pair lands on the axis; {} is the upper root", c.first))
                } else {
                    (EventKind::AxisCollision, format!("{} continues as the resonance (Re k > 0)", c.first))
                };
                events.push(EventRecord {
                    kind,
                    u_critical: c.u,
                    alpha_critical: sector.alpha(),
                    k_critical: Complex64::new(0.0, c.kappa),
                    participants: vec![c.first.to_string(), c.second.to_string()],
                    products: Vec::new(),
                    resolved: c.residual < 1e-9,
                    bracket: c.bracket,
                    residual: c.residual,
                    notes: vec![note],
                });
            }
        }
        debug_assert_eq!(mags_done.len(), mags.len());
        for n in 1..=n_max {
            let label = PoleLabel { sector, n };
            let fz = -(n as f64) * spec.half_inverse_range();
            let kappa: Vec<Option<f64>> = ubar
                .iter()
                .map(|&x| {
                    if x == 0.0 {
                        return Some(fz);
                    }
                    if (x < 0.0) != (sector == Sector::R) {
                        return None;
                    }
                    let i = mags.iter().position(|&m| m == x.abs())?;
                    per_label[n as usize - 1].get(i).copied().flatten()
                })
                .collect();
            flows.push(AxisFlow { label, kappa });
        }
    }
    events.sort_by(|x, y| x.u_critical.total_cmp(&y.u_critical));
    Ok(SweepResult { ubar, flows, events })
}

fn axis_roots(spec: &PotentialSpec, ubar: f64, opts: &SweepOptions) -> Result<Vec<f64>, TraceError> {
    let n = (2.0 * opts.cutoff / opts.scan_step).ceil() as usize;
    // Offset the grid so that kappa = 0 (a root at threshold) is not sampled.
    let ks: Vec<f64> = (0..=n).map(|i| -opts.cutoff + 0.37 * opts.scan_step + i as f64 * opts.scan_step).collect();
    let vals = ks.iter().map(|&q| spec.axis_function(q, ubar)).collect::<Result<Vec<_>, _>>()?;
    let mut roots = Vec::new();
    for i in sign_changes(&vals) {
        let f = |q: f64| spec.axis_function(q, ubar);
        let (lo, hi) = crate::rootfind::real::bisect(f, ks[i], ks[i + 1], vals[i], 1e-12 * ks[i].abs().max(1.0))?;
        roots.push(0.5 * (lo + hi));
    }
    roots.sort_by(|x, y| y.total_cmp(x));
    Ok(roots)
}

fn sweep_square(spec: &PotentialSpec, ubar: Vec<f64>, opts: &SweepOptions) -> Result<SweepResult, TraceError> {
    let roots = ubar.iter().map(|&x| axis_roots(spec, x, opts)).collect::<Result<Vec<_>, _>>()?;
    let width = roots.iter().map(Vec::len).max().unwrap_or(0);
    let mut flows = Vec::new();
    for sector in [Sector::R, Sector::A] {
        for n in 1..=width as u32 {
            let kappa = ubar
                .iter()
                .zip(&roots)
                .map(|(&x, r)| {
                    let inside = x == 0.0 || (x < 0.0) == (sector == Sector::R);
                    if inside { r.get(n as usize - 1).copied() } else { None }
                })
                .collect();
            flows.push(AxisFlow { label: PoleLabel { sector, n }, kappa });
        }
    }
    let mut events = Vec::new();
    for i in 0..ubar.len() - 1 {
        if roots[i].len() == roots[i + 1].len() || ubar[i] * ubar[i + 1] < 0.0 {
            continue;
        }
        let count = |x: f64| axis_roots(spec, x, opts).map(|r| r.len());
        let (mut lo, mut hi) = (ubar[i], ubar[i + 1]);
        let n_lo = roots[i].len();
        while (hi - lo).abs() > 1e-9 * hi.abs().max(1.0) {
            let m = 0.5 * (lo + hi);
            if count(m)? == n_lo {
                lo = m;
            } else {
                hi = m;
            }
        }
        // Pair location: the roots present on one side but not the other,
        // which sit next to each other in the ranking.
        let (more, less) = if roots[i].len() > roots[i + 1].len() { (lo, hi) } else { (hi, lo) };
        let rm = axis_roots(spec, more, opts)?;
        let rl = axis_roots(spec, less, opts)?;
        let mut kappa = rm.first().copied().unwrap_or(0.0);
        let mut best = f64::INFINITY;
        for w in rm.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let nearest = rl.iter().map(|r| (r - mid).abs()).fold(f64::INFINITY, f64::min);
            let score = (w[0] - w[1]).abs() - nearest;
            if score < best {
                best = score;
                kappa = mid;
            }
        }
        let alpha = if lo < 0.0 { std::f64::consts::PI } else { 0.0 };
        let u = 0.5 * (lo + hi).abs();
        let dopts = DegeneracyOptions { free_alpha: false, ..Default::default() };
        let seed = Complex64::new(0.0, kappa);
        let (u_c, k_c, residual) = match solve_degeneracy(spec, seed, alpha, u, &dopts) {
            Ok(p) if (p.u - u).abs() < 1e-3 * u.max(1.0) => (p.u, Complex64::new(0.0, p.k.im), p.residual),
            _ => (u, seed, degeneracy_residual(spec, seed, alpha, u).unwrap_or(f64::NAN)),
        };
        let arriving = roots[i + 1].len() > roots[i].len();
        events.push(EventRecord {
            kind: EventKind::AxisCollision,
            u_critical: u_c,
            alpha_critical: alpha,
            k_critical: k_c,
            participants: Vec::new(),
            products: Vec::new(),
            resolved: residual < 1e-9,
            bracket: (lo.abs().min(hi.abs()), lo.abs().max(hi.abs())),
            residual,
            notes: vec![if arriving == (ubar[i] >= 0.0) {
                "pair arrives on the axis as the strength grows".into()
            } else {
                "pair leaves the axis as the strength grows".into()
            }],
        });
    }
    events.sort_by(|x, y| x.u_critical.total_cmp(&y.u_critical));
    Ok(SweepResult { ubar, flows, events })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hulthen_repulsive_sweep_is_collision_free() {
        let spec = PotentialSpec::hulthen(1.0);
        let r = sweep_real_strength(&spec, (-60.0, 0.0), 6, &SweepOptions { step: 1.0, ..Default::default() }).unwrap();
        assert!(r.events.is_empty());
        let r1 = r.flows.iter().find(|f| f.label == PoleLabel::r(1)).unwrap();
        let want = 70.0 * (-spec.strength_factor() * 60.0 - 1.0);
        assert!((r1.kappa[0].unwrap() - want).abs() < 1e-8 * want.abs());
        assert_eq!(r1.kappa.last().unwrap().unwrap(), -70.0);
    }

    #[test]
    fn grid_hits_both_ends() {
        let g = grid(-1.0, 2.0, 0.7);
        assert_eq!(g[0], -1.0);
        assert_eq!(*g.last().unwrap(), 2.0);
        assert!(g.windows(2).all(|w| w[1] - w[0] <= 0.7 + 1e-12));
    }
}
