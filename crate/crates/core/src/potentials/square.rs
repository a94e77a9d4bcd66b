use num_complex::Complex64;

use super::PotentialSpec;
use crate::error::EvalError;
use crate::specfun::{reduced_hankel_1, reduced_hankel_1_prime, reduced_j};

/// Normalized denominator of the square-well S-matrix,
///
/// `-j~_l(x) P(z) + (l j~_l(x) - x^2 j~_{l+1}(x)) h^(z)`,
///
/// with `z = k r0`, `x = K r0`, `K^2 = k^2 + 2 m U e^{i alpha}`,
/// `j~_l = j_l / x^l`, `h^(z) = z^{l+1} e^{-iz} h_l^(1)(z)` and
/// `P = z (i h^ + h^') - (l + 1) h^`. It equals
/// `r0 z^{l+1} e^{-iz} x^{-l}` times
/// `-k j_l(K r0) h_l^(1)'(k r0) + K j_l'(K r0) h_l^(1)(k r0)`,
/// is entire in `k` and even in `K` for every `l`.
pub fn pole_condition_square(
    k: Complex64,
    alpha: f64,
    spec: &PotentialSpec,
) -> Result<Complex64, EvalError> {
    let l = spec.l;
    let z = k * spec.r0;
    let x2 = z * z + spec.coupling(alpha, spec.u);
    let x = x2.sqrt();
    Ok(normalized_denominator(l, z, x))
}

pub fn normalized_denominator(l: u32, z: Complex64, x: Complex64) -> Complex64 {
    let h = reduced_hankel_1(l, z);
    let hp = reduced_hankel_1_prime(l, z);
    let p = z * (Complex64::i() * h + hp) - (l as f64 + 1.0) * h;
    let jl = reduced_j(l, x);
    let jn = reduced_j(l + 1, x);
    -jl * p + (l as f64 * jl - x * x * jn) * h
}
