//! Jost series in `z = e^{-r / r0}` for potentials
//! `V(r) = sum_j V_j e^{-j r / r0}`, `V_j = -U e^{i alpha} (-c)^{j-1}`.
//!
//! With `mu = -2 i k r0` the coefficients obey
//! `a_n n (n + mu) = -v S_n`, `S_n = a_{n-1} + (-c) S_{n-1}`, `a_0 = 1`.
//! The sum `F(k) = sum a_n` is the Jost function at `-k`; it has simple poles
//! at the fixed zeros `mu = -n`.

use num_complex::Complex64;

use super::PotentialSpec;
use crate::error::EvalError;
use crate::specfun::rgamma;

pub const MAX_TERMS: usize = 20_000;
const GUARD: f64 = 1e-6;

fn check_guard(k: Complex64, spec: &PotentialSpec) -> Result<(), EvalError> {
    let w = spec.half_inverse_range();
    let n = (-k.im / w).round();
    if n >= 1.0 && (k - spec.fixed_zero(n as u32)).norm() < GUARD * w {
        return Err(EvalError::RecursionSingular { n: n as u32 });
    }
    Ok(())
}

fn sum_series(mu: Complex64, v: Complex64, c: f64) -> Result<Complex64, EvalError> {
    let mc = -c;
    let geometric = 1.0 / (1.0 - c.abs()).max(1e-12);
    let mut a_prev = Complex64::new(1.0, 0.0);
    let mut conv = Complex64::new(0.0, 0.0);
    let mut sum = a_prev;
    let mut abs_sum = 1.0;
    for n in 1..=MAX_TERMS {
        conv = a_prev + mc * conv;
        let nf = n as f64;
        let a = -v * conv / (nf * (mu + nf));
        sum += a;
        abs_sum += a.norm();
        let tail = (a_prev.norm() + a.norm()) * geometric;
        if n >= 4 && (tail < 1e-12 * sum.norm() || tail < 1e-16 * abs_sum) {
            if !(sum.re.is_finite() && sum.im.is_finite()) {
                break;
            }
            return Ok(sum);
        }
        a_prev = a;
    }
    Err(EvalError::SeriesNonConvergence { terms: MAX_TERMS })
}

/// `F(k) = sum_n a_n(k)` at strength `spec.u`.
pub fn jost_series(k: Complex64, alpha: f64, spec: &PotentialSpec) -> Result<Complex64, EvalError> {
    check_guard(k, spec)?;
    let mu = Complex64::new(0.0, -2.0 * spec.r0) * k;
    sum_series(mu, spec.coupling(alpha, spec.u), spec.c)
}

/// `F(k) / Gamma(1 - 2 i k r0)`: the fixed poles of `F` are cancelled,
/// leaving an entire function whose zeros are the moving poles.
pub fn pole_condition_series_jost(
    k: Complex64,
    alpha: f64,
    spec: &PotentialSpec,
) -> Result<Complex64, EvalError> {
    let mu = Complex64::new(0.0, -2.0 * spec.r0) * k;
    let v = spec.coupling(alpha, spec.u);
    let n = (-mu.re).round();
    if n >= 1.0 && (mu + n).norm() < NEAR_FIXED_ZERO {
        return sum_regular(mu, v, spec.c);
    }
    let f = sum_series(mu, v, spec.c)?;
    Ok(f * rgamma(1.0 + mu)?)
}

/// Distance in `mu` below which the pole condition is summed in the
/// regular form.
const NEAR_FIXED_ZERO: f64 = 1e-3;

/// `sum_n t_n / Gamma(1 + mu + n)` with `t_n = a_n (mu + 1)_n`, which obeys
/// `T_n = t_{n-1} - c (mu + n - 1) T_{n-1}`, `t_n = -v T_n / n`.
/// No division by `mu + n` up to the singular index. Past it the factorial
/// growth of `t_n` is absorbed by carrying `P_n = T_n / Gamma(1 + mu + n)`.
fn sum_regular(mu: Complex64, v: Complex64, c: f64) -> Result<Complex64, EvalError> {
    let geometric = 1.0 / (1.0 - c.abs()).max(1e-12);
    let switch = (-mu.re).round().max(0.0) as usize + 1;
    let mut t_prev = Complex64::new(1.0, 0.0);
    let mut big_t = Complex64::new(0.0, 0.0);
    let mut p = Complex64::new(0.0, 0.0);
    let mut sum = rgamma(1.0 + mu)?;
    let mut abs_sum = sum.norm();
    let mut prev_term = sum;
    for n in 1..=MAX_TERMS {
        let nf = n as f64;
        let term = if n <= switch {
            big_t = t_prev - c * (mu + nf - 1.0) * big_t;
            let t = -v * big_t / nf;
            t_prev = t;
            let r = rgamma(1.0 + mu + nf)?;
            p = big_t * r;
            t * r
        } else {
            p = (prev_term - c * (mu + nf - 1.0) * p) / (mu + nf);
            -v * p / nf
        };
        sum += term;
        abs_sum += term.norm();
        let tail = (prev_term.norm() + term.norm()) * geometric;
        if n > switch + 2 && (tail < 1e-12 * sum.norm() || tail < 1e-16 * abs_sum) {
            return Ok(sum);
        }
        prev_term = term;
    }
    Err(EvalError::SeriesNonConvergence { terms: MAX_TERMS })
}

/// First-order displacement `eps` of the zero near `mu = -n`:
/// the pole sits at `k = k_n^FZ + i eps / (2 r0)` with
/// `eps = v S_n / n` evaluated at `mu = -n`.
pub fn series_first_order_offset(n: u32, alpha: f64, u: f64, spec: &PotentialSpec) -> Complex64 {
    let v = spec.coupling(alpha, u);
    let mu = -(n as f64);
    let mc = -spec.c;
    let mut a_prev = Complex64::new(1.0, 0.0);
    let mut conv = Complex64::new(0.0, 0.0);
    for j in 1..=n {
        conv = a_prev + mc * conv;
        if j < n {
            let jf = j as f64;
            a_prev = -v * conv / (jf * (mu + jf));
        }
    }
    v * conv / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::pole_condition_exponential;
    use crate::rootfind::refine_root;

    #[test]
    fn free_limit_is_one() {
        let spec = PotentialSpec::generalized_hulthen(1e-14, -0.5);
        let f = jost_series(Complex64::new(40.0, -25.0), 0.3, &spec).unwrap();
        assert!((f - 1.0).norm() < 1e-14);
    }

    #[test]
    fn zero_shape_matches_bessel_series() {
        let spec = PotentialSpec::generalized_hulthen(10.0, 0.0);
        let ex = PotentialSpec::exponential(10.0);
        for k in [Complex64::new(20.0, -50.0), Complex64::new(-150.0, 30.0), Complex64::new(0.0, -250.0)] {
            let a = pole_condition_series_jost(k, 0.7, &spec).unwrap();
            let b = pole_condition_exponential(k, 0.7, &ex).unwrap();
            assert!((a - b).norm() < 1e-12 * b.norm().max(1e-3), "{k}: {a} {b}");
        }
    }

    #[test]
    fn regular_form_agrees_off_the_fixed_zero() {
        for c in [-0.95, -0.5, 0.0, 0.4] {
            let spec = PotentialSpec::generalized_hulthen(7.0, c);
            let k = spec.fixed_zero(2) + Complex64::new(0.3, -0.2);
            let mu = Complex64::new(0.0, -2.0 * spec.r0) * k;
            let v = spec.coupling(0.9, spec.u);
            let a = sum_series(mu, v, c).unwrap() * rgamma(1.0 + mu).unwrap();
            let b = sum_regular(mu, v, c).unwrap();
            assert!((a - b).norm() < 1e-12 * a.norm(), "c={c}: {a} {b}");
        }
    }

    #[test]
    fn pole_condition_finite_at_fixed_zero() {
        let spec = PotentialSpec::generalized_hulthen(1.0, -0.5);
        let d = pole_condition_series_jost(spec.fixed_zero(3), 0.0, &spec).unwrap();
        assert!(d.norm().is_finite() && d.norm() > 0.0);
    }

    #[test]
    fn guard_near_fixed_zero() {
        let spec = PotentialSpec::generalized_hulthen(1.0, -0.5);
        let k = spec.fixed_zero(3) + Complex64::new(1e-6, 0.0);
        assert!(matches!(
            jost_series(k, 0.0, &spec),
            Err(EvalError::RecursionSingular { n: 3 })
        ));
    }

    #[test]
    fn first_order_offset_for_exponential() {
        let spec = PotentialSpec::generalized_hulthen(0.1, 0.0);
        let v = spec.strength_factor() * 0.1;
        let eps = series_first_order_offset(2, 0.0, 0.1, &spec);
        assert!((eps.re - v * v / 2.0).abs() < 1e-18);
    }

    #[test]
    fn first_order_offset_seeds_newton() {
        let spec = PotentialSpec::generalized_hulthen(0.5, -0.5);
        let f = |k| pole_condition_series_jost(k, 0.0, &spec);
        for n in 1..4 {
            let eps = series_first_order_offset(n, 0.0, spec.u, &spec);
            let seed = spec.fixed_zero(n) + Complex64::i() * spec.half_inverse_range() * eps;
            let r = refine_root(&f, seed, 1e-13).unwrap();
            assert!((r.k - seed).norm() < 0.1 * (seed - spec.fixed_zero(n)).norm(), "n={n}");
        }
    }
}
