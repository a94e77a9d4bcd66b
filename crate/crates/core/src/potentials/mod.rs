//! Potential families and their pole conditions.
//!
//! Every family exposes an entire function `D(k; alpha, U)` whose zeros in
//! `k` are exactly the moving S-matrix poles. For the exponential-tail
//! families the Jost function `f(-k)` carries fixed poles at
//! `k_n = -i n / (2 r0)`; they are divided out through `1/Gamma(1 - 2 i k r0)`.

mod exponential;
mod hulthen;
mod series;
mod smatrix;
mod square;

pub use exponential::{bessel_form_exponential, pole_condition_exponential};
pub use hulthen::{hulthen_pole_closed_form, pole_condition_hulthen};
pub use series::{jost_series, pole_condition_series_jost, series_first_order_offset};
pub use smatrix::{s_matrix, s_matrix_square_hankel};
pub use square::{normalized_denominator, pole_condition_square};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::EvalError;
use crate::rootfind::{AnalyticFunction, ParametricFunction};

pub const DEFAULT_MASS: f64 = 940.0;
pub const DEFAULT_R0: f64 = 1.0 / 140.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Exponential,
    Hulthen,
    GeneralizedHulthen,
    Square,
}

impl Family {
    /// Families with an `exp(-r / r0)` tail and fixed zeros.
    pub fn has_fixed_zeros(self) -> bool {
        !matches!(self, Family::Square)
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Family::Exponential => "exponential",
            Family::Hulthen => "hulthen",
            Family::GeneralizedHulthen => "generalized_hulthen",
            Family::Square => "square",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Family {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, SpecError> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "exponential" | "exp" => Ok(Family::Exponential),
            "hulthen" => Ok(Family::Hulthen),
            "generalized_hulthen" | "generalizedhulthen" => Ok(Family::GeneralizedHulthen),
            "square" | "square_well" => Ok(Family::Square),
            _ => Err(SpecError::UnknownFamily(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("{field} must be positive and finite, got {value}")]
    NonPositive { field: &'static str, value: f64 },
    #[error("shape parameter c must satisfy |c| < 1, got {0}")]
    ShapeOutOfRange(f64),
    #[error("angular momentum l must be 0 or 1, got {0}")]
    AngularMomentum(u32),
    #[error("unknown potential family '{0}'")]
    UnknownFamily(String),
    #[error("pole index n must be at least 1")]
    PoleIndex,
}

/// Potential family plus shape parameters. Units: MeV and MeV^-1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub family: Family,
    #[serde(rename = "U")]
    pub u: f64,
    pub r0: f64,
    /// Shape parameter of the generalized Hulthen family; 0 for the
    /// exponential and -1 for the Hulthen potential.
    pub c: f64,
    pub l: u32,
    pub m: f64,
}

impl PotentialSpec {
    /// Spec with default mass and range.
    pub fn new(family: Family, u: f64) -> Self {
        let c = match family {
            Family::Hulthen => -1.0,
            _ => 0.0,
        };
        Self { family, u, r0: DEFAULT_R0, c, l: 0, m: DEFAULT_MASS }
    }

    pub fn exponential(u: f64) -> Self {
        Self::new(Family::Exponential, u)
    }

    pub fn hulthen(u: f64) -> Self {
        Self::new(Family::Hulthen, u)
    }

    pub fn generalized_hulthen(u: f64, c: f64) -> Self {
        Self { c, ..Self::new(Family::GeneralizedHulthen, u) }
    }

    pub fn square(u: f64, l: u32) -> Self {
        Self { l, ..Self::new(Family::Square, u) }
    }

    pub fn with_u(&self, u: f64) -> Self {
        Self { u, ..*self }
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        for (field, value) in [("U", self.u), ("r0", self.r0), ("m", self.m)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(SpecError::NonPositive { field, value });
            }
        }
        match self.family {
            Family::GeneralizedHulthen if self.c.is_nan() || self.c.abs() >= 1.0 => {
                Err(SpecError::ShapeOutOfRange(self.c))
            }
            Family::Square if self.l > 1 => Err(SpecError::AngularMomentum(self.l)),
            _ => Ok(()),
        }
    }

    /// `1 / (2 r0)`, the spacing of the fixed zeros (70 MeV at defaults).
    pub fn half_inverse_range(&self) -> f64 {
        0.5 / self.r0
    }

    /// `2 m r0^2`.
    pub fn strength_factor(&self) -> f64 {
        2.0 * self.m * self.r0 * self.r0
    }

    /// `v = 2 m r0^2 U e^{i alpha}` at strength `u`.
    pub fn coupling(&self, alpha: f64, u: f64) -> Complex64 {
        Complex64::from_polar(self.strength_factor() * u, alpha)
    }

    /// Fixed zero `k_n = -i n / (2 r0)`.
    pub fn fixed_zero(&self, n: u32) -> Complex64 {
        Complex64::new(0.0, -(n as f64) * self.half_inverse_range())
    }

    /// Fixed zeros `n = 1..=n_max`; empty for the square well.
    pub fn fixed_zeros(&self, n_max: u32) -> Vec<Complex64> {
        if self.family.has_fixed_zeros() {
            (1..=n_max).map(|n| self.fixed_zero(n)).collect()
        } else {
            Vec::new()
        }
    }

    /// Constant phase of `D` on the imaginary axis at `alpha = 0, pi`.
    pub fn axis_phase(&self) -> Complex64 {
        match self.family {
            Family::Square => Complex64::new(0.0, 1.0),
            _ => Complex64::new(1.0, 0.0),
        }
    }

    /// Pole condition at strength `u` (overriding `self.u`).
    pub fn pole_condition_at(&self, k: Complex64, alpha: f64, u: f64) -> Result<Complex64, EvalError> {
        let spec = self.with_u(u);
        spec.pole_condition(k, alpha)
    }

    /// Pole condition of this family.
    pub fn pole_condition(&self, k: Complex64, alpha: f64) -> Result<Complex64, EvalError> {
        match self.family {
            Family::Exponential => pole_condition_exponential(k, alpha, self),
            Family::Hulthen => pole_condition_hulthen(k, alpha, self),
            Family::GeneralizedHulthen => pole_condition_series_jost(k, alpha, self),
            Family::Square => pole_condition_square(k, alpha, self),
        }
    }

    /// Real-valued restriction of `D` to `k = i kappa` at `alpha = 0`
    /// (`ubar > 0`) or `alpha = pi` (`ubar < 0`), with strength `|ubar|`.
    pub fn axis_function(&self, kappa: f64, ubar: f64) -> Result<f64, EvalError> {
        let alpha = if ubar < 0.0 { std::f64::consts::PI } else { 0.0 };
        let d = self.pole_condition_at(Complex64::new(0.0, kappa), alpha, ubar.abs())?;
        Ok((d / self.axis_phase()).re)
    }
}

/// `D(k)` at fixed `alpha`, as an [`AnalyticFunction`].
#[derive(Debug, Clone, Copy)]
pub struct PoleCondition {
    pub spec: PotentialSpec,
    pub alpha: f64,
}

impl PoleCondition {
    pub fn new(spec: PotentialSpec, alpha: f64) -> Self {
        Self { spec, alpha }
    }
}

impl AnalyticFunction for PoleCondition {
    fn eval(&self, k: Complex64) -> Result<Complex64, EvalError> {
        self.spec.pole_condition(k, self.alpha)
    }
}

impl ParametricFunction for PotentialSpec {
    fn eval(&self, k: Complex64, alpha: f64, u: f64) -> Result<Complex64, EvalError> {
        self.pole_condition_at(k, alpha, u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(PotentialSpec::exponential(10.0).validate().is_ok());
        assert!(PotentialSpec::exponential(0.0).validate().is_err());
        assert!(PotentialSpec::generalized_hulthen(1.0, 1.0).validate().is_err());
        assert!(PotentialSpec::generalized_hulthen(1.0, -0.95).validate().is_ok());
        assert!(PotentialSpec::square(1.0, 2).validate().is_err());
        let mut s = PotentialSpec::hulthen(1.0);
        s.m = -1.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn default_units() {
        let s = PotentialSpec::exponential(1.0);
        assert!((s.half_inverse_range() - 70.0).abs() < 1e-12);
        assert!((s.strength_factor() - 0.095_918_367_346_938_77).abs() < 1e-15);
        assert_eq!(s.fixed_zero(2), Complex64::new(0.0, -140.0));
        assert!(PotentialSpec::square(1.0, 0).fixed_zeros(3).is_empty());
    }

    #[test]
    fn family_names_round_trip() {
        for f in [Family::Exponential, Family::Hulthen, Family::GeneralizedHulthen, Family::Square] {
            assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
        }
    }
}
