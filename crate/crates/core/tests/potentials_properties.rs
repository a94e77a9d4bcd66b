use std::f64::consts::PI;

use num_complex::Complex64;
use phasepole::potentials::*;
use phasepole::rootfind::{count_zeros_in_rectangle, real::sign_changes, refine_root, Rectangle};
use proptest::prelude::*;

fn families() -> Vec<PotentialSpec> {
    vec![
        PotentialSpec::exponential(12.0),
        PotentialSpec::hulthen(12.0),
        PotentialSpec::generalized_hulthen(12.0, -0.5),
        PotentialSpec::square(60.0, 0),
        PotentialSpec::square(60.0, 1),
    ]
}

#[test]
fn mirrored_zeros() {
    for spec in families() {
        for &(seed, alpha) in &[(Complex64::new(40.0, -90.0), 1.3), (Complex64::new(-30.0, -160.0), 4.0)] {
            let f = |k| spec.pole_condition(k, alpha);
            let Ok(root) = refine_root(&f, seed, 1e-13) else { continue };
            let g = |k| spec.pole_condition(k, -alpha);
            let mirrored = -root.k.conj();
            let scale = phasepole::rootfind::residual_scale(&g, mirrored).unwrap();
            let r = g(mirrored).unwrap().conj().norm() / scale;
            assert!(r < 1e-9, "{:?}: residual {r}", spec.family);
        }
    }
}

#[test]
fn axis_values_lie_on_a_fixed_ray() {
    for spec in families() {
        for alpha in [0.0, PI] {
            for kappa in [-413.0, -200.0, -69.0, -3.0, 0.5, 40.0, 150.0] {
                let k = Complex64::new(0.0, kappa);
                let d = spec.pole_condition(k, alpha).unwrap() / spec.axis_phase();
                assert!(d.im.abs() <= 1e-12 * d.norm().max(1e-300), "{:?} {kappa}: {d}", spec.family);
            }
        }
    }
}

#[test]
fn square_s_wave_single_attractive_antibound_pole() {
    let spec = PotentialSpec::square(1.0, 0);
    let kappas: Vec<f64> = (0..4000).map(|j| -1000.0 + 0.25 * j as f64).collect();
    let vals: Vec<f64> = kappas.iter().map(|&q| spec.axis_function(q, 1.0).unwrap()).collect();
    let roots = sign_changes(&vals);
    assert_eq!(roots.len(), 1);
    assert!(kappas[roots[0]] < 0.0);
}

#[test]
fn square_s_wave_thresholds() {
    // Bound states appear at k = 0 when cos(sqrt(2 m U) r0) = 0.
    let spec = PotentialSpec::square(1.0, 0);
    for (n, want) in [(1, 25.7), (2, 231.5)] {
        let x = (2 * n - 1) as f64 * PI / 2.0;
        let u = x * x / spec.strength_factor();
        assert!((u - want).abs() < 0.1, "{u}");
        assert!(spec.pole_condition_at(Complex64::new(0.0, 0.0), 0.0, u).unwrap().norm() < 1e-13);
    }
}

#[test]
fn hulthen_single_zero_in_rectangle() {
    let spec = PotentialSpec::hulthen(10.0);
    let f = |k| spec.pole_condition(k, 0.0);
    let k1 = hulthen_pole_closed_form(1, 0.0, &spec).unwrap();
    let rect = Rectangle::from_corners(k1 - Complex64::new(20.0, 20.0), k1 + Complex64::new(20.0, 20.0));
    assert_eq!(count_zeros_in_rectangle(&f, &rect, 32).unwrap(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn square_condition_is_even_in_inner_momentum(
        kr in -400.0f64..400.0, ki in -400.0f64..200.0, a in -7.0f64..7.0, u in 1.0f64..250.0, l in 0u32..2,
    ) {
        let spec = PotentialSpec::square(u, l);
        let z = Complex64::new(kr, ki) * spec.r0;
        let x = (z * z + spec.coupling(a, u)).sqrt();
        let d1 = normalized_denominator(l, z, x);
        let d2 = normalized_denominator(l, z, -x);
        prop_assert!((d1 - d2).norm() <= 1e-10 * d1.norm());
    }

    #[test]
    fn zero_count_additive_under_split(u in 1.0f64..30.0, a in 0.0f64..6.2, cut in 0.3f64..0.7) {
        let spec = PotentialSpec::exponential(u);
        let f = |k| spec.pole_condition(k, a);
        let lo = Complex64::new(-200.0, -300.0);
        let hi = Complex64::new(200.0, 80.0);
        let x = lo.re + cut * (hi.re - lo.re) + 0.123;
        let whole = count_zeros_in_rectangle(&f, &Rectangle::from_corners(lo, hi), 64);
        let left = count_zeros_in_rectangle(&f, &Rectangle::from_corners(lo, Complex64::new(x, hi.im)), 64);
        let right = count_zeros_in_rectangle(&f, &Rectangle::from_corners(Complex64::new(x, lo.im), hi), 64);
        if let (Ok(w), Ok(l), Ok(r)) = (whole, left, right) {
            prop_assert_eq!(w, l + r);
        }
    }
}

#[test]
fn zero_count_invariant_under_sample_doubling() {
    let spec = PotentialSpec::exponential(20.0);
    let f = |k| spec.pole_condition(k, 0.9);
    let rect = Rectangle::from_corners(Complex64::new(-300.0, -300.0), Complex64::new(300.0, 100.0));
    let base = count_zeros_in_rectangle(&f, &rect, 32).unwrap();
    assert_eq!(count_zeros_in_rectangle(&f, &rect, 64).unwrap(), base);
    assert_eq!(count_zeros_in_rectangle(&f, &rect, 128).unwrap(), base);
}
