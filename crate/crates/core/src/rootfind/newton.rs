use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{AnalyticFunction, RootError};
use crate::error::EvalError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineOptions {
    /// Stop once `|dk| < tol max(1, |k|)`.
    pub tol: f64,
    /// Required `|D(k)| / scale` at the accepted root.
    pub tol_residual: f64,
    pub max_iter: usize,
    /// Normalization of `|D|`. Computed around the seed when absent.
    pub scale: Option<f64>,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self { tol: 1e-12, tol_residual: 1e-10, max_iter: 60, scale: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootResult {
    pub k: Complex64,
    /// `|D(k)|` divided by the normalization scale.
    pub residual: f64,
    pub iterations: usize,
    pub multiplicity_hint: u32,
    /// Normalized residual before each Newton step.
    pub residual_history: Vec<f64>,
    pub scale: f64,
}

/// Radius of the circle used to normalize `|D|` around `k`.
pub fn scale_radius(k: Complex64) -> f64 {
    0.05 * k.norm().max(1.0)
}

/// Mean of `|D|` on eight points of a small circle around `k`.
pub fn residual_scale<F: AnalyticFunction + ?Sized>(f: &F, k: Complex64) -> Result<f64, EvalError> {
    let r = scale_radius(k);
    let mut total = 0.0;
    for j in 0..8 {
        let th = std::f64::consts::PI * (j as f64 + 0.5) / 4.0;
        total += f.eval(k + Complex64::from_polar(r, th))?.norm();
    }
    let s = total / 8.0;
    Ok(if s > 0.0 && s.is_finite() { s } else { 1.0 })
}

/// Newton refinement with the default options except the step tolerance.
pub fn refine_root<F: AnalyticFunction + ?Sized>(
    f: &F,
    seed: Complex64,
    tol: f64,
) -> Result<RootResult, RootError> {
    refine_root_with(f, seed, &RefineOptions { tol, ..RefineOptions::default() })
}

/// Backtracking Newton iteration switching to the modified step `m D / D'` once a
/// constant contraction ratio `r` reveals a root of multiplicity
/// `m = 1 / (1 - r)`.
pub fn refine_root_with<F: AnalyticFunction + ?Sized>(
    f: &F,
    seed: Complex64,
    opts: &RefineOptions,
) -> Result<RootResult, RootError> {
    let scale = match opts.scale {
        Some(s) => s,
        None => residual_scale(f, seed)?,
    };
    let mut k = seed;
    let mut mult = 1u32;
    let mut prev_step: Option<f64> = None;
    let mut prev_ratio = f64::NAN;
    let mut ratio_run = 0;
    let mut history = Vec::with_capacity(8);
    let done = |k, residual, iterations, mult, history| RootResult {
        k,
        residual,
        iterations,
        multiplicity_hint: mult,
        residual_history: history,
        scale,
    };

    let mut d = f.eval(k)?;
    for it in 1..=opts.max_iter {
        let res = d.norm() / scale;
        history.push(res);
        if d.norm() == 0.0 {
            return Ok(done(k, 0.0, it - 1, mult, history));
        }
        let dp = f.eval_derivative(k)?;
        if dp.norm() * k.norm().max(1.0) < 1e-14 * scale {
            if mult > 1 && res <= opts.tol_residual {
                return Ok(done(k, res, it - 1, mult, history));
            }
            return Err(RootError::NearDegenerate { k });
        }
        let mut step = d / dp * mult as f64;
        if let Some(ps) = prev_step {
            let r = step.norm() / ps;
            if mult == 1 && r > 0.2 && r < 0.95 {
                ratio_run = if (r - prev_ratio).abs() < 0.05 { ratio_run + 1 } else { 0 };
                if ratio_run >= 1 {
                    mult = ((1.0 / (1.0 - r)).round() as u32).clamp(2, 8);
                    step *= mult as f64;
                }
            } else {
                ratio_run = 0;
            }
            prev_ratio = r;
        }
        prev_step = Some(step.norm());

        // Backtrack until |D| decreases.
        let mut lambda = 1.0;
        let (k_new, d_new) = loop {
            let trial = k - lambda * step;
            match f.eval(trial) {
                Ok(v) if v.norm() < d.norm() => break (trial, v),
                Ok(v) if lambda < 1e-3 => break (trial, v),
                Err(e) if lambda < 1e-3 => return Err(e.into()),
                _ => lambda *= 0.5,
            }
        };
        let moved = (k_new - k).norm();
        k = k_new;
        d = d_new;
        if !(k.re.is_finite() && k.im.is_finite()) {
            break;
        }
        if moved < opts.tol * k.norm().max(1.0) && d.norm() / scale <= opts.tol_residual {
            history.push(d.norm() / scale);
            return Ok(done(k, d.norm() / scale, it, mult, history));
        }
    }
    Err(RootError::NonConvergence { last: k, iterations: opts.max_iter })
}
