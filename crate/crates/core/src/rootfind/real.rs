//! One-dimensional real helpers.

/// Bisection on a sign change of `f` in `[a, b]` until the bracket is
/// narrower than `xtol`. Returns the final bracket `(lo, hi)`.
///
/// `fa` is the known value at `a`; `f(b)` must have the opposite sign.
pub fn bisect<E, F>(mut f: F, a: f64, b: f64, fa: f64, xtol: f64) -> Result<(f64, f64), E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let (mut lo, mut hi, mut flo) = (a, b, fa);
    while (hi - lo).abs() > xtol {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok((mid, mid));
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

/// Indices `i` where samples `i` and `i + 1` differ in sign.
pub fn sign_changes(values: &[f64]) -> Vec<usize> {
    values
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] == 0.0 || (w[0] > 0.0) != (w[1] > 0.0))
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisects_cosine() {
        let f = |x: f64| Ok::<_, ()>(x.cos());
        let (lo, hi) = bisect(f, 1.0, 2.0, 1f64.cos(), 1e-12).unwrap();
        assert!(lo <= std::f64::consts::FRAC_PI_2 && hi >= std::f64::consts::FRAC_PI_2);
        assert!(hi - lo <= 1e-12);
    }

    #[test]
    fn finds_sign_changes() {
        assert_eq!(sign_changes(&[1.0, 0.5, -0.2, -1.0, 3.0]), vec![1, 3]);
    }
}
