use num_complex::Complex64;

use super::{PotentialSpec, SpecError};
use crate::error::EvalError;
use crate::specfun::rgamma;

/// `1 / (Gamma(1 - i k r0 + D) Gamma(1 - i k r0 - D))` with
/// `D^2 = g - k^2 r0^2`, `g = 2 m r0^2 U e^{i alpha}`.
///
/// This is `f(-k) / Gamma(1 - 2 i k r0)`: symmetric in `D`, hence free of
/// the square-root branch, and entire in `k`.
pub fn pole_condition_hulthen(
    k: Complex64,
    alpha: f64,
    spec: &PotentialSpec,
) -> Result<Complex64, EvalError> {
    let kr = k * spec.r0;
    let d = (spec.coupling(alpha, spec.u) - kr * kr).sqrt();
    let base = 1.0 - Complex64::i() * kr;
    Ok(rgamma(base + d)? * rgamma(base - d)?)
}

/// `k_n(alpha) = i / (2 r0) (2 m r0^2 U e^{i alpha} / n - n)`.
pub fn hulthen_pole_closed_form(
    n: u32,
    alpha: f64,
    spec: &PotentialSpec,
) -> Result<Complex64, SpecError> {
    if n == 0 {
        return Err(SpecError::PoleIndex);
    }
    let n = n as f64;
    let g = spec.coupling(alpha, spec.u);
    Ok(Complex64::i() * spec.half_inverse_range() * (g / n - n))
}
