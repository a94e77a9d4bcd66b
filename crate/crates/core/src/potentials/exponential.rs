use num_complex::Complex64;

use super::PotentialSpec;
use crate::error::EvalError;
use crate::specfun::{bessel_j_complex_order, bessel_j_reduced};

/// Entire pole condition of the exponential potential,
/// `J_{-i nu}(phi) (phi/2)^{i nu} = sum_j (-v)^j / (j! Gamma(j + 1 - i nu))`
/// with `nu = 2 r0 k` and `v = (phi/2)^2 = 2 m r0^2 U e^{i alpha}`.
///
/// It has the zeros of `J_{-i nu}(phi)` in `k` but depends on `alpha` only
/// through `v`, so it carries no square-root branch.
pub fn pole_condition_exponential(
    k: Complex64,
    alpha: f64,
    spec: &PotentialSpec,
) -> Result<Complex64, EvalError> {
    let order = Complex64::new(0.0, -2.0 * spec.r0) * k;
    Ok(bessel_j_reduced(order, spec.coupling(alpha, spec.u))?)
}

/// `J_{-i nu}(phi)` itself, principal branch of `phi`.
pub fn bessel_form_exponential(
    k: Complex64,
    alpha: f64,
    spec: &PotentialSpec,
) -> Result<Complex64, EvalError> {
    let order = Complex64::new(0.0, -2.0 * spec.r0) * k;
    let phi = 2.0 * spec.coupling(alpha, spec.u).sqrt();
    Ok(bessel_j_complex_order(order, phi)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootfind::refine_root;

    #[test]
    fn free_limit_zeros_sit_on_fixed_zeros() {
        let spec = PotentialSpec::exponential(1e-12);
        for n in 1..5 {
            let d = pole_condition_exponential(spec.fixed_zero(n), 0.0, &spec).unwrap();
            assert!(d.norm() < 1e-10, "n={n} {d}");
        }
    }

    #[test]
    fn small_strength_ground_pole() {
        let spec = PotentialSpec::exponential(0.1);
        let f = |k| pole_condition_exponential(k, 0.0, &spec);
        let r = refine_root(&f, Complex64::new(0.0, -69.0), 1e-13).unwrap();
        let eps = 1.0 + r.k.im / 70.0;
        // First-order offset 2 m r0^2 U = 0.009592.
        assert!((eps - 0.009_591_836_734_693_877).abs() < 1e-4, "{eps}");
        assert!(r.k.re.abs() < 1e-12);
    }

    #[test]
    fn four_pi_invariance() {
        let spec = PotentialSpec::exponential(7.0);
        let k = Complex64::new(35.0, -120.0);
        let a = pole_condition_exponential(k, 0.4, &spec).unwrap();
        let b = pole_condition_exponential(k, 0.4 + 4.0 * std::f64::consts::PI, &spec).unwrap();
        assert!((a - b).norm() < 1e-13 * a.norm());
    }

    #[test]
    fn reduced_and_bessel_forms_share_zeros() {
        let spec = PotentialSpec::exponential(12.0);
        let f = |k| pole_condition_exponential(k, 1.1, &spec);
        let g = |k| bessel_form_exponential(k, 1.1, &spec);
        for seed in [Complex64::new(-20.0, -60.0), Complex64::new(30.0, -200.0)] {
            let a = refine_root(&f, seed, 1e-13).unwrap().k;
            let b = refine_root(&g, seed, 1e-13).unwrap().k;
            assert!((a - b).norm() < 1e-8, "{a} {b}");
        }
    }
}
