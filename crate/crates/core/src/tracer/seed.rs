use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::axis::{continue_axis, continue_resonance};
use super::{PoleLabel, Sector, TraceError};
use crate::potentials::{Family, PoleCondition, PotentialSpec};
use crate::rootfind::{locate_zeros_in_rectangle, Rectangle, RefineOptions};

/// Labeled poles at `alpha = 0` and `alpha = pi` used to name trajectory
/// members at multiples of `pi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelBook {
    pub attractive: Vec<(PoleLabel, Complex64)>,
    pub repulsive: Vec<(PoleLabel, Complex64)>,
}

impl LabelBook {
    pub fn new(spec: &PotentialSpec, n_max: u32) -> Result<Self, TraceError> {
        let all = seed_poles(spec, n_max)?;
        let (attractive, repulsive) = all.into_iter().partition(|(l, _)| l.sector == Sector::A);
        Ok(Self { attractive, repulsive })
    }

    pub fn get(&self, label: PoleLabel) -> Option<Complex64> {
        self.sector(label.sector).iter().find(|(l, _)| *l == label).map(|(_, k)| *k)
    }

    pub fn sector(&self, sector: Sector) -> &[(PoleLabel, Complex64)] {
        match sector {
            Sector::A => &self.attractive,
            Sector::R => &self.repulsive,
        }
    }

    /// Label of the pole at `k` for the sector of `alpha` (a multiple of
    /// `pi`), if one lies within `tol max(1, |k|)`.
    pub fn lookup(&self, alpha: f64, k: Complex64, tol: f64) -> Option<PoleLabel> {
        let j = (alpha / std::f64::consts::PI).round() as i64;
        let sector = if j.rem_euclid(2) == 0 { Sector::A } else { Sector::R };
        self.sector(sector)
            .iter()
            .map(|(l, q)| (*l, (q - k).norm()))
            .filter(|(_, d)| *d <= tol * k.norm().max(1.0))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(l, _)| l)
    }
}

/// Labeled poles `A_1..A_{n_max}`, `R_1..R_{n_max}` at `spec.u`.
///
/// Exponential-tail families: homotopy along the imaginary axis from
/// `U_tiny = 1e-3 U`; a pair that collides on the way continues off the axis
/// and the smaller index becomes the resonance (`Re k > 0`). Square well:
/// every pole with `|k| <= 600 MeV`, labeled per sector by descending
/// `Im k` then descending `Re k`; `n_max` is ignored.
pub fn seed_poles(spec: &PotentialSpec, n_max: u32) -> Result<Vec<(PoleLabel, Complex64)>, TraceError> {
    spec.validate()?;
    if n_max == 0 {
        return Err(TraceError::Invalid("n_max must be at least 1".into()));
    }
    if spec.family == Family::Square {
        return square_poles(spec, 600.0);
    }
    let mut out = Vec::new();
    for sector in [Sector::A, Sector::R] {
        let cont = continue_axis(spec, sector, spec.u, n_max + 4, Some(&[spec.u]))?;
        for n in 1..=n_max {
            let label = PoleLabel { sector, n };
            if let Some(kappa) = cont.final_kappa(label) {
                out.push((label, Complex64::new(0.0, kappa)));
                continue;
            }
            let col = cont.collision_of(label).ok_or(TraceError::MissingPole(label))?;
            let res = continue_resonance(spec, sector, col, spec.u)?;
            out.push((label, if label == col.first { res } else { -res.conj() }));
        }
    }
    Ok(out)
}

/// All poles inside `|k| <= radius` at `alpha = 0` and `pi`.
pub fn square_poles(spec: &PotentialSpec, radius: f64) -> Result<Vec<(PoleLabel, Complex64)>, TraceError> {
    let mut out = Vec::new();
    for sector in [Sector::A, Sector::R] {
        let f = PoleCondition::new(*spec, sector.alpha());
        let opts = RefineOptions { tol: 1e-13, ..Default::default() };
        // Slightly asymmetric box so no edge sits on a symmetry line.
        let mut found = None;
        for shift in [0.0, 1.37, -2.11] {
            let rect = Rectangle::from_corners(
                Complex64::new(-radius - 3.1 + shift, -radius - 2.3),
                Complex64::new(radius + 2.9 + shift, radius + 1.7),
            );
            if let Ok(z) = locate_zeros_in_rectangle(&f, &rect, 96, &opts) {
                found = Some(z);
                break;
            }
        }
        let roots = found.ok_or_else(|| TraceError::Invalid("square-well pole search failed".into()))?;
        let mut ks: Vec<Complex64> = roots
            .into_iter()
            .map(|r| if r.k.re.abs() < 1e-9 * r.k.norm().max(1.0) { Complex64::new(0.0, r.k.im) } else { r.k })
            .filter(|k| k.norm() <= radius)
            .collect();
        ks.sort_by(|a, b| b.im.total_cmp(&a.im).then(b.re.total_cmp(&a.re)));
        for (i, k) in ks.into_iter().enumerate() {
            out.push((PoleLabel { sector, n: i as u32 + 1 }, k));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::hulthen_pole_closed_form;
    use std::f64::consts::PI;

    #[test]
    fn hulthen_homotopy_matches_closed_form() {
        for u in [1.0, 10.0, 45.0] {
            let spec = PotentialSpec::hulthen(u);
            for (label, k) in seed_poles(&spec, 4).unwrap() {
                let want = hulthen_pole_closed_form(label.n, label.sector.alpha(), &spec).unwrap();
                assert!((k - want).norm() < 1e-8 * want.norm(), "{label} at U={u}: {k} vs {want}");
            }
        }
    }

    #[test]
    fn exponential_small_strength_offset() {
        let spec = PotentialSpec::exponential(0.1);
        let poles = seed_poles(&spec, 1).unwrap();
        let a1 = poles.iter().find(|(l, _)| *l == PoleLabel::a(1)).unwrap().1;
        let want = -70.0 * (1.0 - 0.009_592);
        assert!((a1.im - want).abs() < 0.01, "{a1}");
        assert_eq!(a1.re, 0.0);
    }

    #[test]
    fn exponential_resonance_pair_above_fusion() {
        let spec = PotentialSpec::exponential(6.0);
        let poles = seed_poles(&spec, 2).unwrap();
        let r1 = poles.iter().find(|(l, _)| *l == PoleLabel::r(1)).unwrap().1;
        let r2 = poles.iter().find(|(l, _)| *l == PoleLabel::r(2)).unwrap().1;
        assert!(r1.re > 0.0);
        assert_eq!(r2, -r1.conj());
        assert!(spec.pole_condition(r1, PI).unwrap().norm() < 1e-10);
    }

    #[test]
    fn square_s_wave_single_attractive_pole_at_unit_strength() {
        let spec = PotentialSpec::square(1.0, 0);
        let poles = square_poles(&spec, 600.0).unwrap();
        let axis_a: Vec<_> = poles.iter().filter(|(l, k)| l.sector == Sector::A && k.re == 0.0).collect();
        assert_eq!(axis_a.len(), 1);
        assert!(axis_a[0].1.im < 0.0);
    }
}
