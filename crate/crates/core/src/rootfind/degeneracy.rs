use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::newton::scale_radius;
use super::{ParametricFunction, RootError, FD_STEP};

const CAUCHY_POINTS: usize = 16;
use crate::error::EvalError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegeneracyOptions {
    /// Solve for `alpha` too; otherwise it stays at the seed value.
    pub free_alpha: bool,
    pub tol_residual: f64,
    pub max_iter: usize,
    pub max_condition: f64,
}

impl Default for DegeneracyOptions {
    fn default() -> Self {
        Self { free_alpha: true, tol_residual: 1e-9, max_iter: 50, max_condition: 1e12 }
    }
}

/// A double root `D = dD/dk = 0` in `(k, alpha, U)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub k: Complex64,
    pub alpha: f64,
    pub u: f64,
    /// Norm of `(D, rho D') / scale` at the solution.
    pub residual: f64,
    pub iterations: usize,
    /// Condition number of the column-equilibrated Jacobian.
    pub condition: f64,
}

struct System<'a, F: ?Sized> {
    f: &'a F,
    scale: f64,
    rho: f64,
}

impl<F: ParametricFunction + ?Sized> System<'_, F> {
    /// `D`, `D'` and `D''` at `k`; the derivatives come from the trapezoidal
    /// Cauchy integral on a circle of radius `rho / 4`, which for entire `D`
    /// is accurate to rounding instead of the `sqrt(eps)` of a difference.
    fn taylor(&self, k: Complex64, a: f64, u: f64) -> Result<[Complex64; 3], EvalError> {
        let r = 0.25 * self.rho;
        let mut c1 = Complex64::new(0.0, 0.0);
        let mut c2 = Complex64::new(0.0, 0.0);
        for j in 0..CAUCHY_POINTS {
            let th = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / CAUCHY_POINTS as f64;
            let w = Complex64::from_polar(1.0, th);
            let v = self.f.eval(k + r * w, a, u)?;
            c1 += v * w.conj();
            c2 += v * (w * w).conj();
        }
        let n = CAUCHY_POINTS as f64;
        Ok([self.f.eval(k, a, u)?, c1 / (n * r), 2.0 * c2 / (n * r * r)])
    }

    fn d_and_slope(&self, k: Complex64, a: f64, u: f64) -> Result<(Complex64, Complex64), EvalError> {
        let [d, dp, _] = self.taylor(k, a, u)?;
        Ok((d, dp))
    }

    fn residual(&self, k: Complex64, a: f64, u: f64) -> Result<[f64; 4], EvalError> {
        let (d, dp) = self.d_and_slope(k, a, u)?;
        let r0 = d / self.scale;
        let r1 = dp * self.rho / self.scale;
        Ok([r0.re, r0.im, r1.re, r1.im])
    }

    fn jacobian(&self, k: Complex64, a: f64, u: f64, free_alpha: bool) -> Result<DMatrix<f64>, EvalError> {
        let cols = if free_alpha { 4 } else { 3 };
        let mut jac = DMatrix::zeros(4, cols);
        let [_, dp, dpp] = self.taylor(k, a, u)?;
        let col_k = [dp / self.scale, dpp * self.rho / self.scale];
        for (row, v) in col_k.iter().enumerate() {
            jac[(2 * row, 0)] = v.re;
            jac[(2 * row + 1, 0)] = v.im;
            // d/d(Im k) = i d/dk
            jac[(2 * row, 1)] = -v.im;
            jac[(2 * row + 1, 1)] = v.re;
        }
        let mut col = 2;
        if free_alpha {
            let ha = FD_STEP;
            let p = self.residual(k, a + ha, u)?;
            let m = self.residual(k, a - ha, u)?;
            for r in 0..4 {
                jac[(r, col)] = (p[r] - m[r]) / (2.0 * ha);
            }
            col += 1;
        }
        let hu = FD_STEP * u.abs().max(1.0);
        let p = self.residual(k, a, u + hu)?;
        let m = self.residual(k, a, u - hu)?;
        for r in 0..4 {
            jac[(r, col)] = (p[r] - m[r]) / (2.0 * hu);
        }
        Ok(jac)
    }
}

fn norm4(r: &[f64; 4]) -> f64 {
    r.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn condition(jac: &DMatrix<f64>) -> f64 {
    let mut eq = jac.clone();
    for mut c in eq.column_iter_mut() {
        let n = c.norm();
        if n > 0.0 {
            c /= n;
        }
    }
    let sv = eq.singular_values();
    let max = sv.max();
    let min = sv.min();
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

fn circle_scale<F: ParametricFunction + ?Sized>(
    f: &F,
    k: Complex64,
    alpha: f64,
    u: f64,
    rho: f64,
) -> Result<f64, EvalError> {
    let mut total = 0.0;
    for j in 0..8 {
        let th = std::f64::consts::PI * (j as f64 + 0.5) / 4.0;
        total += f.eval(k + Complex64::from_polar(rho, th), alpha, u)?.norm();
    }
    Ok(if total > 0.0 && total.is_finite() { total / 8.0 } else { 1.0 })
}

/// Normalized `|(D, rho D')|` at `(k; alpha, U)`, the quantity the solver
/// drives below its tolerance.
pub fn degeneracy_residual<F: ParametricFunction + ?Sized>(
    f: &F,
    k: Complex64,
    alpha: f64,
    u: f64,
) -> Result<f64, EvalError> {
    let rho = scale_radius(k);
    let scale = circle_scale(f, k, alpha, u, rho)?;
    let sys = System { f, scale, rho };
    Ok(norm4(&sys.residual(k, alpha, u)?))
}

/// Gauss-Newton on `D(k; alpha, U) = 0, dD/dk = 0` with finite-difference
/// Jacobian and step halving. Residuals are normalized by the mean `|D|` on
/// a small circle around the seed.
pub fn solve_degeneracy<F: ParametricFunction + ?Sized>(
    f: &F,
    seed_k: Complex64,
    seed_alpha: f64,
    seed_u: f64,
    opts: &DegeneracyOptions,
) -> Result<CriticalPoint, RootError> {
    let rho = scale_radius(seed_k);
    let scale = circle_scale(f, seed_k, seed_alpha, seed_u, rho)?;
    let sys = System { f, scale, rho };

    let (mut k, mut a, mut u) = (seed_k, seed_alpha, seed_u);
    let mut res = norm4(&sys.residual(k, a, u)?);
    for it in 0..opts.max_iter {
        let jac = sys.jacobian(k, a, u, opts.free_alpha)?;
        if res < opts.tol_residual {
            let cond = condition(&jac);
            let point = CriticalPoint { k, alpha: a, u, residual: res, iterations: it, condition: cond };
            if cond > opts.max_condition {
                return Err(RootError::IllConditioned { condition: cond, point });
            }
            return Ok(point);
        }
        let r = sys.residual(k, a, u)?;
        let rhs = DVector::from_row_slice(&r);
        let svd = jac.clone().svd(true, true);
        let eps = 1e-14 * svd.singular_values.max();
        let step = match svd.solve(&rhs, eps) {
            Ok(s) => s,
            Err(_) => break,
        };
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..12 {
            let nk = k - lambda * Complex64::new(step[0], step[1]);
            let (na, nu) = if opts.free_alpha {
                (a - lambda * step[2], u - lambda * step[3])
            } else {
                (a, u - lambda * step[2])
            };
            if let Ok(nr) = sys.residual(nk, na, nu) {
                let nres = norm4(&nr);
                if nres < res {
                    k = nk;
                    a = na;
                    u = nu;
                    res = nres;
                    improved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if res < opts.tol_residual {
        let jac = sys.jacobian(k, a, u, opts.free_alpha)?;
        let cond = condition(&jac);
        let point = CriticalPoint { k, alpha: a, u, residual: res, iterations: opts.max_iter, condition: cond };
        if cond > opts.max_condition {
            return Err(RootError::IllConditioned { condition: cond, point });
        }
        return Ok(point);
    }
    Err(RootError::DegeneracyNonConvergence { k, alpha: a, u, residual: res })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constructed_fold_in_strength() {
        let u0 = 3.0;
        let f = |k: Complex64, _a: f64, u: f64| Ok(k * k - (u - u0));
        let opts = DegeneracyOptions { free_alpha: false, ..Default::default() };
        let p = solve_degeneracy(&f, c(0.2, 0.1), 0.0, 3.5, &opts).unwrap();
        assert!(p.k.norm() < 1e-9);
        assert!((p.u - u0).abs() < 1e-9);
        assert!(p.residual < 1e-9);
    }

    #[test]
    fn fold_in_both_parameters() {
        let f = |k: Complex64, a: f64, u: f64| {
            let s = k - c(0.0, 2.0);
            Ok(s * s - (u - 3.0) - c(0.0, 1.0) * (a - 1.0))
        };
        let p = solve_degeneracy(&f, c(0.1, 1.8), 1.2, 3.3, &DegeneracyOptions::default()).unwrap();
        assert!((p.k - c(0.0, 2.0)).norm() < 1e-8);
        assert!((p.alpha - 1.0).abs() < 1e-8);
        assert!((p.u - 3.0).abs() < 1e-8);
    }

    #[test]
    fn parameter_free_direction_is_ill_conditioned() {
        let f = |k: Complex64, _a: f64, u: f64| Ok(k * k - (u - 3.0));
        let r = solve_degeneracy(&f, c(0.2, 0.1), 0.0, 3.5, &DegeneracyOptions::default());
        assert!(matches!(r, Err(RootError::IllConditioned { .. })));
    }
}
