//! Spherical Bessel and Hankel functions of complex argument, integer order.
//!
//! Hankel functions come from their terminating closed forms; `j_l` uses the
//! ascending series near the origin and `(h1 + h2) / 2` elsewhere. Orders 0
//! and 1 are the tested range.

use num_complex::Complex64;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `(l + m)! / (m! (l - m)!)`
fn hankel_coef(l: u32, m: u32) -> f64 {
    let mut c = 1.0;
    for t in (l - m + 1)..=(l + m) {
        c *= t as f64;
    }
    for t in 1..=m {
        c /= t as f64;
    }
    c
}

fn i_pow(n: i64) -> Complex64 {
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => I,
        2 => Complex64::new(-1.0, 0.0),
        _ => -I,
    }
}

fn series_radius(l: u32) -> f64 {
    1.0 + l as f64
}

/// `j_l(z) / z^l`, an even entire function.
pub fn reduced_j(l: u32, z: Complex64) -> Complex64 {
    if z.norm() < series_radius(l) {
        let w = -0.5 * z * z;
        let mut dfact = 1.0;
        for t in (1..=(2 * l + 1)).step_by(2) {
            dfact *= t as f64;
        }
        let mut term = Complex64::new(1.0 / dfact, 0.0);
        let mut sum = term;
        for k in 1..60u32 {
            term *= w / (k as f64 * (2 * l + 2 * k + 1) as f64);
            sum += term;
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        spherical_bessel_j(l, z) / z.powi(l as i32)
    }
}

pub fn spherical_hankel_1(l: u32, z: Complex64) -> Complex64 {
    let s: Complex64 = (0..=l)
        .map(|m| hankel_coef(l, m) * (I / (2.0 * z)).powi(m as i32))
        .sum();
    i_pow(-(l as i64) - 1) * (I * z).exp() / z * s
}

pub fn spherical_hankel_2(l: u32, z: Complex64) -> Complex64 {
    let s: Complex64 = (0..=l)
        .map(|m| hankel_coef(l, m) * (-I / (2.0 * z)).powi(m as i32))
        .sum();
    i_pow(l as i64 + 1) * (-I * z).exp() / z * s
}

pub fn spherical_bessel_j(l: u32, z: Complex64) -> Complex64 {
    if z.norm() < series_radius(l) {
        reduced_j(l, z) * z.powi(l as i32)
    } else {
        0.5 * (spherical_hankel_1(l, z) + spherical_hankel_2(l, z))
    }
}

/// Spherical Neumann function `n_l = (h1 - h2) / 2i`.
pub fn spherical_bessel_y(l: u32, z: Complex64) -> Complex64 {
    (spherical_hankel_1(l, z) - spherical_hankel_2(l, z)) / (2.0 * I)
}

/// `j_l'(z) = l z^{l-1} j~_l - z^{l+1} j~_{l+1}`, finite at the origin.
pub fn spherical_bessel_j_prime(l: u32, z: Complex64) -> Complex64 {
    let tail = -z.powi(l as i32 + 1) * reduced_j(l + 1, z);
    if l == 0 {
        tail
    } else {
        l as f64 * z.powi(l as i32 - 1) * reduced_j(l, z) + tail
    }
}

pub fn spherical_bessel_y_prime(l: u32, z: Complex64) -> Complex64 {
    l as f64 / z * spherical_bessel_y(l, z) - spherical_bessel_y(l + 1, z)
}

pub fn spherical_hankel_1_prime(l: u32, z: Complex64) -> Complex64 {
    l as f64 / z * spherical_hankel_1(l, z) - spherical_hankel_1(l + 1, z)
}

pub fn spherical_hankel_2_prime(l: u32, z: Complex64) -> Complex64 {
    l as f64 / z * spherical_hankel_2(l, z) - spherical_hankel_2(l + 1, z)
}

/// `z^{l+1} e^{-iz} h_l^(1)(z)`, a polynomial of degree `l`.
pub fn reduced_hankel_1(l: u32, z: Complex64) -> Complex64 {
    let s: Complex64 = (0..=l)
        .map(|m| hankel_coef(l, m) * (0.5 * I).powi(m as i32) * z.powi((l - m) as i32))
        .sum();
    i_pow(-(l as i64) - 1) * s
}

/// Derivative of [`reduced_hankel_1`] in `z`.
pub fn reduced_hankel_1_prime(l: u32, z: Complex64) -> Complex64 {
    let s: Complex64 = (0..l)
        .map(|m| {
            hankel_coef(l, m)
                * (0.5 * I).powi(m as i32)
                * (l - m) as f64
                * z.powi((l - m - 1) as i32)
        })
        .sum();
    i_pow(-(l as i64) - 1) * s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1e-300)
    }

    #[test]
    fn limit_at_origin() {
        assert_eq!(spherical_bessel_j(0, c(0.0, 0.0)), c(1.0, 0.0));
        assert!(close(spherical_bessel_j(0, c(1e-9, 0.0)), c(1.0, 0.0), 1e-16));
        assert!(close(spherical_bessel_j(1, c(1e-3, 0.0)), c(1e-3 / 3.0, 0.0), 1e-6));
    }

    #[test]
    fn hankel_at_imaginary_unit() {
        let sinh1 = 1.175_201_193_643_801_4;
        let j0 = spherical_bessel_j(0, I);
        assert!(close(j0, c(sinh1, 0.0), 1e-15));
        let h = spherical_hankel_1(0, I);
        let want = j0 + I * spherical_bessel_y(0, I);
        assert!(close(h, want, 1e-15));
        // -i e^{-1} / i = -e^{-1}
        assert!(close(h, c(-(-1.0f64).exp(), 0.0), 1e-15));
    }

    #[test]
    fn against_high_precision_values() {
        // mpmath spherical Bessel functions at z = 0.7 - 1.3i.
        let z = c(0.7, -1.3);
        let cases = [
            (spherical_bessel_j(0, z), c(1.182_330_901_230_821_3, 0.340_050_904_879_461_2)),
            (spherical_bessel_y(0, z), c(0.168_421_817_397_197_54, -1.250_256_633_116_293)),
            (spherical_bessel_j(1, z), c(0.345_286_704_790_901_8, -0.436_006_263_843_040_4)),
            (spherical_bessel_y(1, z), c(-0.382_684_619_015_583_2, -0.641_074_428_074_437_5)),
        ];
        for (got, want) in cases {
            assert!(close(got, want, 1e-13), "{got} vs {want}");
        }
    }

    #[test]
    fn j_is_mean_of_hankels() {
        for &z in &[c(2.3, 0.4), c(-1.7, -3.1), c(0.2, 0.9), c(5.5, -0.3)] {
            for l in 0..3 {
                let avg = 0.5 * (spherical_hankel_1(l, z) + spherical_hankel_2(l, z));
                assert!(close(spherical_bessel_j(l, z), avg, 1e-12), "l={l} z={z}");
            }
        }
    }

    #[test]
    fn reduced_hankel_matches_definition() {
        for &z in &[c(0.8, -0.2), c(3.0, 1.5), c(-2.0, -4.0)] {
            for l in 0..3 {
                let direct = z.powi(l as i32 + 1) * (-I * z).exp() * spherical_hankel_1(l, z);
                assert!(close(reduced_hankel_1(l, z), direct, 1e-13));
                let h = 1e-6;
                let fd = (reduced_hankel_1(l, z + h) - reduced_hankel_1(l, z - h)) / (2.0 * h);
                let d = reduced_hankel_1_prime(l, z);
                assert!((fd - d).norm() < 1e-8 * d.norm().max(1.0));
            }
        }
    }

    #[test]
    fn derivative_of_j_matches_finite_difference() {
        for &z in &[c(0.3, 0.1), c(1.5, -0.5), c(4.0, 2.0)] {
            for l in 0..3 {
                let h = 1e-6;
                let fd = (spherical_bessel_j(l, z + h) - spherical_bessel_j(l, z - h)) / (2.0 * h);
                let d = spherical_bessel_j_prime(l, z);
                assert!((fd - d).norm() < 1e-8 * d.norm().max(1.0), "l={l} z={z}");
            }
        }
    }
}
