use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::seed::LabelBook;
use super::trace::{TraceOptions, Tracer};
use super::{EventKind, EventRecord, Periodicity, PoleLabel, Sector, TraceError, Trajectory};
use crate::par::{self, Exec};
use crate::potentials::{Family, PoleCondition, PotentialSpec};
use crate::rootfind::{refine_root, solve_degeneracy, DegeneracyOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventOptions {
    /// Spacing of the initial strength scan (MeV).
    pub scan_step: f64,
    /// Target bracket width of the strength bisection (MeV).
    pub bracket: f64,
    pub tol_residual: f64,
    pub trace: TraceOptions,
    pub exec: Exec,
}

impl Default for EventOptions {
    fn default() -> Self {
        Self { scan_step: 0.25, bracket: 1e-3, tol_residual: 1e-9, trace: TraceOptions::default(), exec: Exec::Parallel }
    }
}

/// Comparable part of one trajectory. Exponential-tail families compare
/// member labels; the square well, whose labels are plain rankings, compares
/// closed trajectories by periodicity and sector counts only.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SignatureEntry {
    pub periodicity: Periodicity,
    pub members: Vec<PoleLabel>,
    pub n_attractive: usize,
    pub n_repulsive: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signature {
    pub u: f64,
    pub entries: Vec<SignatureEntry>,
    pub trajectories: Vec<Trajectory>,
}

impl Signature {
    pub fn same_topology(&self, other: &Signature) -> bool {
        self.entries == other.entries
    }
}

fn entry(t: &Trajectory, labeled: bool) -> SignatureEntry {
    let members = t.members();
    let n_attractive = members.iter().filter(|l| l.sector == Sector::A).count();
    let n_repulsive = members.len() - n_attractive;
    SignatureEntry { periodicity: t.periodicity, members: if labeled { members } else { Vec::new() }, n_attractive, n_repulsive }
}

/// Topology of the trajectories through `A_1..A_{n_max}`, `R_1..R_{n_max}`
/// (square well: through every pole within the cutoff) at `spec.u`.
pub fn signature(spec: &PotentialSpec, n_max: u32, opts: &EventOptions) -> Result<Signature, TraceError> {
    let square = spec.family == Family::Square;
    let book = LabelBook::new(spec, n_max + 2)?;
    let starts: Vec<PoleLabel> = if square {
        book.attractive.iter().chain(&book.repulsive).map(|(l, _)| *l).collect()
    } else {
        (1..=n_max).flat_map(|n| [PoleLabel::a(n), PoleLabel::r(n)]).collect()
    };
    let tracer = Tracer::with_book(*spec, opts.trace, book);
    let traced = par::map(opts.exec, &starts, |&l| {
        let a = l.sector.alpha();
        tracer.trace_label(l, (a, a + 2.0 * PI))
    });
    let mut trajectories: Vec<Trajectory> = Vec::new();
    for (l, t) in starts.iter().zip(traced) {
        let t = t?;
        let members = t.members();
        if !members.contains(l) {
            return Err(TraceError::AmbiguousEndpoint {
                u: spec.u,
                reason: format!("trajectory started at {l} does not return to it"),
            });
        }
        if !trajectories.iter().any(|o| o.members().iter().any(|m| members.contains(m))) {
            trajectories.push(t);
        }
    }
    let mut entries: Vec<SignatureEntry> = trajectories
        .iter()
        .filter(|t| !square || t.periodicity != Periodicity::Open)
        .map(|t| entry(t, !square))
        .collect();
    entries.sort();
    Ok(Signature { u: spec.u, entries, trajectories })
}

/// [`detect_events_with`] with default options.
pub fn detect_events(spec: &PotentialSpec, u_range: (f64, f64), n_max: u32) -> Result<Vec<EventRecord>, TraceError> {
    detect_events_with(spec, u_range, n_max, &EventOptions::default())
}

/// Restructuring events of `spec`'s family for `U` in `u_range`, sorted by
/// `U_critical`. `spec.u` is ignored.
pub fn detect_events_with(
    spec: &PotentialSpec,
    u_range: (f64, f64),
    n_max: u32,
    opts: &EventOptions,
) -> Result<Vec<EventRecord>, TraceError> {
    let (a, b) = u_range;
    if !(a > 0.0 && b > a && b.is_finite()) {
        return Err(TraceError::Invalid(format!("bad strength range ({a}, {b})")));
    }
    let n = (((b - a) / opts.scan_step).ceil() as usize).max(1);
    let us: Vec<f64> = (0..=n).map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 }).collect();
    let sigs = par::map(opts.exec, &us, |&u| probe(spec, u, n_max, opts, true));
    let sigs = sigs.into_iter().collect::<Result<Vec<_>, _>>()?;

    let cells: Vec<(usize, usize)> = (0..n).filter(|&i| !sigs[i].same_topology(&sigs[i + 1])).map(|i| (i, i + 1)).collect();
    let found = par::map(opts.exec, &cells, |&(i, j)| bisect(spec, n_max, opts, sigs[i].clone(), sigs[j].clone()));
    let mut events = Vec::new();
    for f in found {
        events.extend(f?);
    }
    if spec.family == Family::Square && spec.l >= 1 {
        for mut z in zero_momentum_events(spec, &us)? {
            // The loop that appears at a zero-momentum collision is the same
            // event seen through the topology; fold it into one record.
            let pad = 10.0 * opts.bracket;
            if let Some(i) = events.iter().position(|e| {
                e.kind == EventKind::LoopFormation && z.u_critical > e.bracket.0 - pad && z.u_critical < e.bracket.1 + pad
            }) {
                let e = events.remove(i);
                z.notes.push(format!("topology: {} -> {}", e.participants.join(", "), e.products.join(", ")));
                z.products = e.products;
            }
            events.push(z);
        }
    }
    events.sort_by(|x, y| x.u_critical.total_cmp(&y.u_critical));
    Ok(events)
}

/// Signature at `u`; interior probes that fail get one nudged retry.
fn probe(spec: &PotentialSpec, u: f64, n_max: u32, opts: &EventOptions, retry: bool) -> Result<Signature, TraceError> {
    match signature(&spec.with_u(u), n_max, opts) {
        Ok(s) => Ok(s),
        Err(_) if retry => probe(spec, u * (1.0 + 1e-7), n_max, opts, false),
        Err(e) => Err(TraceError::AmbiguousEndpoint { u, reason: format!("{e}; perturb the endpoint") }),
    }
}

fn bisect(
    spec: &PotentialSpec,
    n_max: u32,
    opts: &EventOptions,
    mut lo: Signature,
    mut hi: Signature,
) -> Result<Vec<EventRecord>, TraceError> {
    let mut resolved_bracket = true;
    while hi.u - lo.u > opts.bracket {
        // A probe landing right on a degeneracy fails; try off-centre ones
        // before settling for the current bracket.
        let probe_at = |frac: f64| signature(&spec.with_u(lo.u + frac * (hi.u - lo.u)), n_max, opts).ok();
        let Some(s) = probe_at(0.5).or_else(|| probe_at(0.37)).or_else(|| probe_at(0.63)) else {
            resolved_bracket = false;
            break;
        };
        if s.same_topology(&lo) {
            lo = s;
        } else if s.same_topology(&hi) {
            hi = s;
        } else {
            let mut left = bisect(spec, n_max, opts, lo, s.clone())?;
            left.extend(bisect(spec, n_max, opts, s, hi)?);
            return Ok(left);
        }
    }
    Ok(vec![locate(spec, opts, &lo, &hi, resolved_bracket)])
}

/// `k` on `t` at unwrapped phase `alpha`, by linear interpolation.
fn sample(t: &Trajectory, alpha: f64) -> Option<Complex64> {
    let p = &t.points;
    let i = p.partition_point(|q| q.alpha < alpha);
    if i == 0 {
        return (p[0].alpha == alpha).then_some(p[0].k);
    }
    if i == p.len() {
        return None;
    }
    let (a, b) = (p[i - 1], p[i]);
    let s = (alpha - a.alpha) / (b.alpha - a.alpha);
    Some(a.k + (b.k - a.k) * s)
}

/// Poles carried by `t` at every unwrapped phase congruent to `alpha`.
fn poles_at(t: &Trajectory, alpha: f64, out: &mut Vec<Complex64>) {
    let (a0, a1) = match t.periodicity.period() {
        Some(p) => (t.points[0].alpha, t.points[0].alpha + p - 1e-12),
        None => (t.points[0].alpha, t.points.last().unwrap().alpha),
    };
    let m0 = ((a0 - alpha) / (2.0 * PI)).ceil() as i64;
    let m1 = ((a1 - alpha) / (2.0 * PI)).floor() as i64;
    for m in m0..=m1 {
        if let Some(k) = sample(t, alpha + 2.0 * PI * m as f64) {
            out.push(k);
        }
    }
}

/// Closest pair of distinct poles over a common phase grid.
fn closest_pair(trajs: &[&Trajectory]) -> Option<(f64, Complex64, Complex64, f64)> {
    let mut best: Option<(f64, Complex64, Complex64, f64)> = None;
    let m = 2048;
    let mut ks = Vec::new();
    for j in 0..m {
        let alpha = 2.0 * PI * j as f64 / m as f64;
        ks.clear();
        for t in trajs {
            poles_at(t, alpha, &mut ks);
        }
        for x in 0..ks.len() {
            for y in x + 1..ks.len() {
                let d = (ks[x] - ks[y]).norm();
                if d < 1e-6 * ks[x].norm().max(1.0) {
                    continue;
                }
                if best.is_none_or(|b| d < b.3) {
                    best = Some((alpha, ks[x], ks[y], d));
                }
            }
        }
    }
    best
}

fn classify(removed: &[&Trajectory], added: &[&Trajectory], open: bool) -> (EventKind, Vec<String>) {
    let per = |ts: &[&Trajectory]| {
        let mut v: Vec<Periodicity> = ts.iter().map(|t| t.periodicity).collect();
        v.sort();
        v
    };
    use Periodicity::*;
    let (r, a) = (per(removed), per(added));
    let mut notes = Vec::new();
    let kind = match (r.as_slice(), a.as_slice()) {
        _ if open || r.is_empty() || a.is_empty() => EventKind::LoopFormation,
        ([TwoPi, TwoPi], [FourPi]) => EventKind::Fusion,
        ([FourPi], [TwoPi, TwoPi]) => {
            notes.push("fission: one FourPi splits into two TwoPi trajectories".into());
            EventKind::Fusion
        }
        ([TwoPi, FourPi], [TwoPi, FourPi]) => EventKind::RearrangementI,
        ([FourPi, FourPi], [FourPi, FourPi]) => EventKind::RearrangementII,
        _ => {
            notes.push(format!("unlisted pattern {r:?} -> {a:?}"));
            EventKind::RearrangementI
        }
    };
    (kind, notes)
}

/// Check `m = m' = 2n`, `n' = 2n - 1` for a fusion
/// `(R_{n'} - A_n) + (R_{m'} - A_m)`.
fn fusion_condition(removed: &[&Trajectory]) -> Option<String> {
    let mut pairs = Vec::new();
    for t in removed {
        let m = t.members();
        let a: Vec<u32> = m.iter().filter(|l| l.sector == Sector::A).map(|l| l.n).collect();
        let r: Vec<u32> = m.iter().filter(|l| l.sector == Sector::R).map(|l| l.n).collect();
        if a.len() != 1 || r.len() != 1 {
            return None;
        }
        pairs.push((a[0], r[0]));
    }
    pairs.sort();
    let [(n, n1), (m, m1)] = pairs[..] else { return None };
    let holds = m == 2 * n && m1 == 2 * n && n1 == 2 * n - 1;
    Some(format!(
        "fusion condition m = m' = 2n, n' = 2n - 1 {} for (R{n1}-A{n}) + (R{m1}-A{m})",
        if holds { "holds" } else { "VIOLATED" }
    ))
}

fn locate(spec: &PotentialSpec, opts: &EventOptions, lo: &Signature, hi: &Signature, bracket_ok: bool) -> EventRecord {
    let square = spec.family == Family::Square;
    let pick = |s: &Signature, other: &Signature| -> Vec<Trajectory> {
        s.trajectories
            .iter()
            .filter(|t| {
                if square && t.periodicity == Periodicity::Open {
                    return false;
                }
                let e = entry(t, !square);
                !other.entries.contains(&e) || s.entries.iter().filter(|x| **x == e).count() != other.entries.iter().filter(|x| **x == e).count()
            })
            .cloned()
            .collect()
    };
    let removed = pick(lo, hi);
    let added = pick(hi, lo);
    let opens = |s: &Signature| -> Vec<Trajectory> {
        s.trajectories.iter().filter(|t| t.periodicity == Periodicity::Open).cloned().collect()
    };
    let (open_lo, open_hi) = (opens(lo), opens(hi));
    let open_involved = square && (!open_lo.is_empty() || !open_hi.is_empty());
    let removed_refs: Vec<&Trajectory> = removed.iter().collect();
    let added_refs: Vec<&Trajectory> = added.iter().collect();
    let (kind, mut notes) = classify(&removed_refs, &added_refs, open_involved);

    let mut involved_lo: Vec<&Trajectory> = removed.iter().collect();
    let mut involved_hi: Vec<&Trajectory> = added.iter().collect();
    if open_involved {
        involved_lo.extend(open_lo.iter());
        involved_hi.extend(open_hi.iter());
    }
    let cand_lo = closest_pair(&involved_lo).map(|c| (c, lo.u));
    let cand_hi = closest_pair(&involved_hi).map(|c| (c, hi.u));
    let best = match (cand_lo, cand_hi) {
        (Some(x), Some(y)) => Some(if x.0 .3 <= y.0 .3 { x } else { y }),
        (x, y) => x.or(y),
    };

    let mut participants: Vec<String> = removed.iter().map(|t| t.identifier()).collect();
    let products: Vec<String> = added.iter().map(|t| t.identifier()).collect();
    if open_involved && participants.is_empty() {
        participants = open_lo.iter().map(|t| t.identifier()).collect();
    }
    if kind == EventKind::Fusion {
        if let Some(n) = fusion_condition(&removed_refs) {
            notes.push(n);
        }
    }
    let u_mid = 0.5 * (lo.u + hi.u);
    let mut rec = EventRecord {
        kind,
        u_critical: u_mid,
        alpha_critical: f64::NAN,
        k_critical: Complex64::new(f64::NAN, f64::NAN),
        participants,
        products,
        resolved: false,
        bracket: (lo.u, hi.u),
        residual: f64::NAN,
        notes,
    };
    let Some(((alpha, k1, k2, _), u_seed)) = best else {
        rec.notes.push("no approaching pair found".into());
        return rec;
    };
    // Polish both poles at the seed phase before the 4D solve.
    let f = PoleCondition::new(spec.with_u(u_seed), alpha);
    let k1 = refine_root(&f, k1, 1e-12).map(|r| r.k).unwrap_or(k1);
    let k2 = refine_root(&f, k2, 1e-12).map(|r| r.k).unwrap_or(k2);
    let seed = 0.5 * (k1 + k2);
    rec.alpha_critical = alpha;
    rec.k_critical = seed;
    let dopts = DegeneracyOptions { tol_residual: opts.tol_residual, ..Default::default() };
    match solve_degeneracy(spec, seed, alpha, u_mid, &dopts) {
        Ok(p) => {
            let mut a = p.alpha.rem_euclid(2.0 * PI);
            if a > 2.0 * PI - 1e-9 {
                a = 0.0;
            }
            let mut k = p.k;
            let on_axis = a < 1e-9 || (a - PI).abs() < 1e-9;
            // Report the contact in (pi, 2 pi); its mirror sits at 2 pi - alpha.
            if !on_axis && a < PI {
                a = 2.0 * PI - a;
                k = -k.conj();
            }
            if !on_axis {
                rec.notes.push(format!("mirrored contact at alpha = {:.6} pi", (2.0 * PI - a) / PI));
            }
            let inside = p.u > lo.u - 10.0 * opts.bracket && p.u < hi.u + 10.0 * opts.bracket;
            rec.u_critical = p.u;
            rec.alpha_critical = a;
            rec.k_critical = k;
            rec.residual = p.residual;
            rec.resolved = bracket_ok && inside && p.residual < opts.tol_residual;
            if !inside {
                rec.notes.push(format!("double root at U = {} lies outside the bracket", p.u));
                rec.u_critical = u_mid;
            }
        }
        Err(e) => rec.notes.push(format!("degeneracy solve failed: {e}")),
    }
    rec
}

/// Square well, `l >= 1`: strengths where a pole pair meets at `k = 0`,
/// located by bisection on the sign of `D(0)` in `U`.
fn zero_momentum_events(spec: &PotentialSpec, us: &[f64]) -> Result<Vec<EventRecord>, TraceError> {
    let g = |u: f64| spec.axis_function(0.0, u);
    let vals = us.iter().map(|&u| g(u)).collect::<Result<Vec<_>, _>>()?;
    let mut out = Vec::new();
    for i in crate::rootfind::real::sign_changes(&vals) {
        let (lo, hi) = crate::rootfind::real::bisect(g, us[i], us[i + 1], vals[i], 1e-12 * us[i + 1])?;
        let u = 0.5 * (lo + hi);
        // The two poles nearest k = 0 just below the collision.
        let below = crate::tracer::seed::square_poles(&spec.with_u(lo - 1e-3 * lo.max(1.0)), 600.0)?;
        let mut near: Vec<(PoleLabel, Complex64)> = below.into_iter().filter(|(l, _)| l.sector == Sector::A).collect();
        near.sort_by(|x, y| x.1.norm().total_cmp(&y.1.norm()));
        out.push(EventRecord {
            kind: EventKind::ZeroMomentumCollision,
            u_critical: u,
            alpha_critical: 0.0,
            k_critical: Complex64::new(0.0, 0.0),
            participants: near.iter().take(2).map(|(l, k)| format!("{l}@{:.6}{:+.6}i", k.re, k.im)).collect(),
            products: Vec::new(),
            resolved: true,
            bracket: (lo, hi),
            residual: (g(u)?.abs()) / g(us[i])?.abs().max(1e-300),
            notes: vec!["located by bisection on D(k = 0) in U".into()],
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_fusion() {
        let spec = PotentialSpec::exponential(1.0);
        let ev = detect_events(&spec, (3.8, 4.4), 2).unwrap();
        assert_eq!(ev.len(), 1, "{ev:?}");
        let e = &ev[0];
        assert_eq!(e.kind, EventKind::Fusion);
        assert!(e.u_critical > 4.0 && e.u_critical < 4.2);
        assert!(e.residual < 1e-9);
        assert!((e.alpha_critical - PI).abs() < 1e-6);
        assert!(e.notes.iter().any(|n| n.contains("holds")), "{:?}", e.notes);
    }

    #[test]
    fn hulthen_signature_all_two_pi() {
        let s = signature(&PotentialSpec::hulthen(40.0), 3, &EventOptions::default()).unwrap();
        assert!(s.entries.iter().all(|e| e.periodicity == Periodicity::TwoPi));
        assert_eq!(s.entries.len(), 3);
    }
}
