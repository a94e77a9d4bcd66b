use std::f64::consts::PI;

use num_complex::Complex64;
use phasepole::specfun::*;
use proptest::prelude::*;

fn off_poles(re: f64, im: f64) -> bool {
    im.abs() > 1e-3 || (re - re.round()).abs() > 1e-3 || re > 0.5
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn gamma_recurrence(re in -20.0f64..20.0, im in -20.0f64..20.0) {
        prop_assume!(off_poles(re, im) && re * re + im * im <= 400.0);
        let z = Complex64::new(re, im);
        let next = ln_gamma(z + 1.0).unwrap().exp();
        let this = z * ln_gamma(z).unwrap().exp();
        prop_assert!((next - this).norm() <= 1e-11 * next.norm());
    }

    #[test]
    fn gamma_reflection(re in -8.0f64..8.0, im in -4.0f64..4.0) {
        prop_assume!(im.abs() > 1e-2 || (re - re.round()).abs() > 1e-2);
        let z = Complex64::new(re, im);
        let lhs = gamma(z).unwrap() * gamma(1.0 - z).unwrap();
        let rhs = PI / sin_pi(z);
        prop_assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm());
    }

    #[test]
    fn rgamma_is_reciprocal(re in -15.0f64..15.0, im in -10.0f64..10.0) {
        prop_assume!(off_poles(re, im));
        let z = Complex64::new(re, im);
        let prod = rgamma(z).unwrap() * gamma(z).unwrap();
        prop_assert!((prod - 1.0).norm() <= 1e-11);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn bessel_series_stable_under_term_doubling(
        ore in -20.0f64..20.0, oim in -10.0f64..10.0,
        r in 0.0f64..10.0, th in -PI..PI,
    ) {
        let order = Complex64::new(ore, oim);
        let arg = Complex64::from_polar(r, th);
        let v = 0.25 * arg * arg;
        let s = bessel_j_reduced(order, v).unwrap();
        // Convergence is reached well inside the first 250 terms here.
        let doubled = bessel_j_reduced_terms(order, v, 2 * MAX_SERIES_TERMS).unwrap();
        let scale = s.norm().max(doubled.norm());
        prop_assert!((s - doubled).norm() <= 1e-12 * scale, "{} vs {}", s, doubled);
    }

    #[test]
    fn spherical_wronskian(re in -6.0f64..6.0, im in -4.0f64..4.0) {
        prop_assume!(re * re + im * im > 0.01);
        let z = Complex64::new(re, im);
        for l in 0..2 {
            let w = spherical_bessel_j(l, z) * spherical_bessel_y_prime(l, z)
                - spherical_bessel_j_prime(l, z) * spherical_bessel_y(l, z);
            let want = 1.0 / (z * z);
            prop_assert!((w - want).norm() <= 1e-10 * want.norm(), "l={} z={}", l, z);
        }
    }

    #[test]
    fn j_is_mean_of_hankels(re in -8.0f64..8.0, im in -5.0f64..5.0) {
        prop_assume!(re * re + im * im > 1e-4);
        let z = Complex64::new(re, im);
        for l in 0..2 {
            let j = spherical_bessel_j(l, z);
            let avg = 0.5 * (spherical_hankel_1(l, z) + spherical_hankel_2(l, z));
            let scale = spherical_hankel_1(l, z).norm().max(spherical_hankel_2(l, z).norm());
            prop_assert!((j - avg).norm() <= 1e-13 * scale);
        }
    }
}
