//! Bessel function of the first kind for complex order, by the ascending
//! series.
//!
//! `J_nu(z) = (z/2)^nu * S(nu, z^2/4)` where
//! `S(nu, v) = sum_j (-v)^j / (j! Gamma(nu + j + 1))` is entire in both
//! arguments. Most callers want `S` itself: it carries every zero of
//! `J_nu(z)` in `nu` and has no branch cut in `z`.

use num_complex::Complex64;

use super::gamma::rgamma;
use super::SpecialFunctionError;

/// Hard cap on the number of series terms.
pub const MAX_SERIES_TERMS: usize = 500;

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// First index at which `Re(order + j + 1) >= 1`; terms from there on are
/// generated by a forward ratio with a non-vanishing denominator.
fn ratio_start(order: Complex64) -> usize {
    let start = (-order.re).ceil();
    if start > 0.0 {
        start as usize
    } else {
        0
    }
}

/// Terms `j < ratio_start` straddle the poles of Gamma and are computed one
/// by one through `1/Gamma`; returns the partial sum, the last term and the
/// running power `(-v)^j / j!`.
fn leading_terms(
    order: Complex64,
    v: Complex64,
    upto: usize,
) -> Result<(Complex64, Complex64), SpecialFunctionError> {
    let mut power = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut term = Complex64::new(0.0, 0.0);
    for j in 0..=upto {
        if j > 0 {
            power *= -v / j as f64;
        }
        term = power * rgamma(order + (j as f64 + 1.0))?;
        sum += term;
    }
    Ok((sum, term))
}

/// `S(order, v) = sum_j (-v)^j / (j! Gamma(order + j + 1))`, summed until
/// two consecutive terms fall below double precision relative to the sum.
pub fn bessel_j_reduced(order: Complex64, v: Complex64) -> Result<Complex64, SpecialFunctionError> {
    if !finite(order) || !finite(v) {
        return Err(SpecialFunctionError::NonFinite);
    }
    let j0 = ratio_start(order);
    if j0 + 2 > MAX_SERIES_TERMS {
        return Err(SpecialFunctionError::NonConvergence { terms: j0 });
    }
    let (mut sum, mut term) = leading_terms(order, v, j0)?;
    let mut small_run = 0;
    for j in (j0 + 1)..MAX_SERIES_TERMS {
        let denom = j as f64 * (order + j as f64);
        term *= -v / denom;
        sum += term;
        let decreasing = v.norm() < 0.5 * denom.norm();
        if decreasing && term.norm() <= 1e-17 * sum.norm() {
            small_run += 1;
            if small_run >= 2 {
                return if finite(sum) { Ok(sum) } else { Err(SpecialFunctionError::Overflow) };
            }
        } else {
            small_run = 0;
        }
    }
    Err(SpecialFunctionError::NonConvergence { terms: MAX_SERIES_TERMS })
}

/// Same series with an explicit term count (no convergence test).
pub fn bessel_j_reduced_terms(
    order: Complex64,
    v: Complex64,
    n_terms: usize,
) -> Result<Complex64, SpecialFunctionError> {
    if n_terms == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let j0 = ratio_start(order).min(n_terms - 1);
    let (mut sum, mut term) = leading_terms(order, v, j0)?;
    for j in (j0 + 1)..n_terms {
        term *= -v / (j as f64 * (order + j as f64));
        sum += term;
    }
    if finite(sum) {
        Ok(sum)
    } else {
        Err(SpecialFunctionError::Overflow)
    }
}

/// `J_order(arg)` for complex order, principal branch of `(arg/2)^order`.
///
/// Designed for `|arg| <= 10`, `|order| <= 20`, where the series reaches
/// about 1e-10 relative accuracy or better.
pub fn bessel_j_complex_order(
    order: Complex64,
    arg: Complex64,
) -> Result<Complex64, SpecialFunctionError> {
    if !finite(order) || !finite(arg) {
        return Err(SpecialFunctionError::NonFinite);
    }
    if arg.norm() == 0.0 {
        if order.norm() == 0.0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        if order.re > 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        return Err(SpecialFunctionError::Domain("J_nu(0) is unbounded for Re nu <= 0, nu != 0"));
    }
    let half = arg * 0.5;
    let s = bessel_j_reduced(order, half * half)?;
    let val = (order * half.ln()).exp() * s;
    if finite(val) {
        Ok(val)
    } else {
        Err(SpecialFunctionError::Overflow)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn order_zero_at_origin() {
        assert_eq!(bessel_j_complex_order(c(0.0, 0.0), c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        assert!(bessel_j_complex_order(c(-0.5, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn integer_orders_on_real_axis() {
        // J_0(2), J_1(2), J_5(10) from mpmath.
        let cases = [
            (0.0, 2.0, 0.223_890_779_141_235_67),
            (1.0, 2.0, 0.576_724_807_756_873_4),
            (5.0, 10.0, -0.234_061_528_186_793_64),
        ];
        for (n, x, want) in cases {
            let got = bessel_j_complex_order(c(n, 0.0), c(x, 0.0)).unwrap();
            assert!((got.re - want).abs() < 1e-13 * want.abs().max(1.0), "{n} {x} {got}");
            assert!(got.im.abs() < 1e-15);
        }
    }

    #[test]
    fn complex_order_against_high_precision_value() {
        // mpmath besselj(1 - i, 1 + i) at 40 digits.
        let got = bessel_j_complex_order(c(1.0, -1.0), c(1.0, 1.0)).unwrap();
        let want = c(0.342_893_041_804_338_45, 2.303_027_636_782_287_5);
        assert!((got - want).norm() < 1e-12 * want.norm());
    }

    #[test]
    fn negative_integer_order_reflection() {
        // J_{-n}(z) = (-1)^n J_n(z).
        for n in 1..6 {
            let z = c(1.3, -0.4);
            let pos = bessel_j_complex_order(c(n as f64, 0.0), z).unwrap();
            let neg = bessel_j_complex_order(c(-(n as f64), 0.0), z).unwrap();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((neg - sign * pos).norm() < 1e-13 * pos.norm());
        }
    }

    #[test]
    fn reduced_series_vanishes_at_free_zeros() {
        for n in 1..8 {
            let s = bessel_j_reduced(c(-(n as f64), 0.0), c(0.0, 0.0)).unwrap();
            assert_eq!(s, c(0.0, 0.0));
        }
    }
}
