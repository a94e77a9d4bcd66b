use num_complex::Complex64;

use super::square::normalized_denominator;
use super::{jost_series, pole_condition_square, Family, PotentialSpec};
use crate::error::EvalError;
use crate::specfun::{
    bessel_j_reduced, rgamma, spherical_bessel_j, spherical_bessel_j_prime, spherical_hankel_1,
    spherical_hankel_1_prime, spherical_hankel_2, spherical_hankel_2_prime,
};

fn ratio(num: Complex64, den: Complex64, k: Complex64) -> Result<Complex64, EvalError> {
    let s = num / den;
    if den.norm() == 0.0 || !(s.re.is_finite() && s.im.is_finite()) {
        return Err(EvalError::SMatrixPole { re: k.re, im: k.im });
    }
    Ok(s)
}

/// S-matrix element `S_l(k, alpha)` at strength `spec.u`.
pub fn s_matrix(k: Complex64, alpha: f64, spec: &PotentialSpec) -> Result<Complex64, EvalError> {
    let inu = Complex64::new(0.0, 2.0 * spec.r0) * k;
    match spec.family {
        Family::Exponential => {
            // (phi/2)^{-2 i nu} Gamma(1 + i nu) J_{i nu}(phi) / (Gamma(1 - i nu) J_{-i nu}(phi)),
            // one principal log of phi/2 throughout.
            let v = spec.coupling(alpha, spec.u);
            let ln_half_phi = v.sqrt().ln();
            let j_plus = (inu * ln_half_phi).exp() * bessel_j_reduced(inu, v)?;
            let j_minus = (-inu * ln_half_phi).exp() * bessel_j_reduced(-inu, v)?;
            let num = (-2.0 * inu * ln_half_phi).exp() * j_plus * rgamma(1.0 - inu)?;
            let den = rgamma(1.0 + inu)? * j_minus;
            ratio(num, den, k)
        }
        Family::Hulthen => {
            let num = rgamma(1.0 - inu)? * spec.pole_condition(-k, alpha)?;
            let den = rgamma(1.0 + inu)? * spec.pole_condition(k, alpha)?;
            ratio(num, den, k)
        }
        Family::GeneralizedHulthen => {
            let num = jost_series(-k, alpha, spec)?;
            let den = jost_series(k, alpha, spec)?;
            ratio(num, den, k)
        }
        Family::Square => {
            let z = k * spec.r0;
            let x = (z * z + spec.coupling(alpha, spec.u)).sqrt();
            let num = (-2.0 * Complex64::i() * z).exp() * normalized_denominator(spec.l, -z, x);
            let den = pole_condition_square(k, alpha, spec)?;
            ratio(num, den, k)
        }
    }
}

/// Square-well S-matrix from spherical Bessel and Hankel functions directly:
/// `(k j h2' - K j' h2) / (-k j h1' + K j' h1)`.
pub fn s_matrix_square_hankel(
    k: Complex64,
    alpha: f64,
    spec: &PotentialSpec,
) -> Result<Complex64, EvalError> {
    let l = spec.l;
    let big_k = (k * k + 2.0 * spec.m * spec.u * Complex64::from_polar(1.0, alpha)).sqrt();
    let (z, x) = (k * spec.r0, big_k * spec.r0);
    let (j, jp) = (spherical_bessel_j(l, x), spherical_bessel_j_prime(l, x));
    let num = k * j * spherical_hankel_2_prime(l, z) - big_k * jp * spherical_hankel_2(l, z);
    let den = -k * j * spherical_hankel_1_prime(l, z) + big_k * jp * spherical_hankel_1(l, z);
    ratio(num, den, k)
}
