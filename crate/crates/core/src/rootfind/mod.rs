//! Zeros of analytic functions of one complex variable: Newton refinement,
//! argument-principle counting and location, and double-root (fold) solving
//! in two extra real parameters.

mod contour;
mod degeneracy;
mod newton;
pub mod real;

pub use contour::{count_zeros_in_rectangle, locate_zeros_in_rectangle, Rectangle};
pub use degeneracy::{degeneracy_residual, solve_degeneracy, CriticalPoint, DegeneracyOptions};
pub use newton::{refine_root, refine_root_with, residual_scale, scale_radius, RefineOptions, RootResult};

use num_complex::Complex64;
use thiserror::Error;

use crate::error::EvalError;

/// A map `k -> D(k)` analytic in `k`, optionally with a derivative map.
///
/// Implementations must be deterministic and callable from several threads.
pub trait AnalyticFunction: Sync {
    fn eval(&self, k: Complex64) -> Result<Complex64, EvalError>;

    /// Closed-form derivative, if one exists.
    fn derivative(&self, _k: Complex64) -> Option<Result<Complex64, EvalError>> {
        None
    }

    /// Derivative map, falling back to a central difference with step
    /// `1e-6 max(1, |k|)`.
    fn eval_derivative(&self, k: Complex64) -> Result<Complex64, EvalError> {
        if let Some(d) = self.derivative(k) {
            return d;
        }
        let h = FD_STEP * k.norm().max(1.0);
        Ok((self.eval(k + h)? - self.eval(k - h)?) / (2.0 * h))
    }
}

impl<F> AnalyticFunction for F
where
    F: Fn(Complex64) -> Result<Complex64, EvalError> + Sync,
{
    fn eval(&self, k: Complex64) -> Result<Complex64, EvalError> {
        self(k)
    }
}

/// A function `D(k; alpha, u)` analytic in `k` for fixed real parameters.
pub trait ParametricFunction: Sync {
    fn eval(&self, k: Complex64, alpha: f64, u: f64) -> Result<Complex64, EvalError>;
}

impl<F> ParametricFunction for F
where
    F: Fn(Complex64, f64, f64) -> Result<Complex64, EvalError> + Sync,
{
    fn eval(&self, k: Complex64, alpha: f64, u: f64) -> Result<Complex64, EvalError> {
        self(k, alpha, u)
    }
}

/// Relative step of the central difference used for derivatives.
pub const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("Newton iteration did not converge after {iterations} iterations (last iterate {last})")]
    NonConvergence { last: Complex64, iterations: usize },
    #[error("derivative vanishes near k = {k}: near-degenerate root")]
    NearDegenerate { k: Complex64 },
    #[error("contour too coarse: phase jump {jump:.3} rad near k = {near}")]
    ContourTooCoarse { jump: f64, near: Complex64 },
    #[error("winding sum {turns:.4} is not close to an integer")]
    NonIntegerWinding { turns: f64 },
    #[error("degeneracy solve did not converge (residual {residual:.3e} at k = {k}, alpha = {alpha}, U = {u})")]
    DegeneracyNonConvergence { k: Complex64, alpha: f64, u: f64, residual: f64 },
    #[error("ill-conditioned degeneracy Jacobian (condition {condition:.3e})")]
    IllConditioned { condition: f64, point: CriticalPoint },
}
