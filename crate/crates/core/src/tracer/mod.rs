//! Pole trajectories in the phase `alpha`: seeding by small-strength
//! homotopy, predictor-corrector continuation, periodicity and winding
//! classification, real-strength sweeps and restructuring events.

mod axis;
mod events;
mod seed;
mod sweep;
mod trace;

pub use axis::{continue_axis, AxisCollision, AxisContinuation};
pub use events::{
    detect_events, detect_events_with, signature, EventOptions, Signature, SignatureEntry,
};
pub use seed::{seed_poles, LabelBook};
pub use sweep::{sweep_real_strength, AxisFlow, SweepOptions, SweepResult};
pub use trace::{trace, signed_area, TraceOptions, Tracer};

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::EvalError;
use crate::potentials::{PotentialSpec, SpecError};
use crate::rootfind::RootError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sector {
    /// Attractive, `alpha = 0 mod 2 pi`.
    A,
    /// Repulsive, `alpha = pi mod 2 pi`.
    R,
}

impl Sector {
    pub fn alpha(self) -> f64 {
        match self {
            Sector::A => 0.0,
            Sector::R => std::f64::consts::PI,
        }
    }

    /// Sign of the effective strength `Ubar = e^{i alpha} U`.
    pub fn sign(self) -> f64 {
        match self {
            Sector::A => 1.0,
            Sector::R => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PoleLabel {
    pub sector: Sector,
    pub n: u32,
}

impl PoleLabel {
    pub fn a(n: u32) -> Self {
        Self { sector: Sector::A, n }
    }

    pub fn r(n: u32) -> Self {
        Self { sector: Sector::R, n }
    }
}

impl fmt::Display for PoleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.sector, self.n)
    }
}

impl std::str::FromStr for PoleLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (head, tail) = s.split_at(s.len().min(1));
        let sector = match head {
            "A" | "a" => Sector::A,
            "R" | "r" => Sector::R,
            _ => return Err(format!("bad pole label '{s}'")),
        };
        let n: u32 = tail.parse().map_err(|_| format!("bad pole label '{s}'"))?;
        if n == 0 {
            return Err(format!("bad pole label '{s}'"));
        }
        Ok(Self { sector, n })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Periodicity {
    TwoPi,
    FourPi,
    Open,
}

impl Periodicity {
    /// Period in `alpha`, `None` when open.
    pub fn period(self) -> Option<f64> {
        match self {
            Periodicity::TwoPi => Some(2.0 * std::f64::consts::PI),
            Periodicity::FourPi => Some(4.0 * std::f64::consts::PI),
            Periodicity::Open => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub alpha: f64,
    pub k: Complex64,
}

/// Label carried by the pole at `alpha`, a multiple of `pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelAt {
    pub alpha: f64,
    pub label: PoleLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub spec: PotentialSpec,
    pub points: Vec<PhasePoint>,
    pub periodicity: Periodicity,
    pub labels: Vec<LabelAt>,
    /// Winding number around each fixed zero `k_n`, keyed by `n`.
    pub windings: BTreeMap<u32, i64>,
}

impl Trajectory {
    /// Distinct member labels in ascending order.
    pub fn members(&self) -> Vec<PoleLabel> {
        let mut m: Vec<PoleLabel> = self.labels.iter().map(|l| l.label).collect();
        m.sort();
        m.dedup();
        m
    }

    /// Short identifier such as `TwoPi:A1+R1`.
    pub fn identifier(&self) -> String {
        let names: Vec<String> = self.members().iter().map(|l| l.to_string()).collect();
        format!("{:?}:{}", self.periodicity, names.join("+"))
    }

    /// Points of the first full period, or all points when open.
    pub fn first_period(&self) -> &[PhasePoint] {
        let Some(p) = self.periodicity.period() else { return &self.points };
        let a0 = self.points[0].alpha;
        let end = self
            .points
            .iter()
            .position(|q| q.alpha > a0 + p + 1e-12)
            .unwrap_or(self.points.len());
        &self.points[..end]
    }

    /// Shoelace area of the first period; positive for counterclockwise.
    pub fn signed_area(&self) -> f64 {
        signed_area(self.first_period())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EventKind {
    Fusion,
    RearrangementI,
    RearrangementII,
    AxisCollision,
    /// A resonance pair returning to the imaginary axis.
    AxisArrival,
    ZeroMomentumCollision,
    LoopFormation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub kind: EventKind,
    #[serde(rename = "U_critical")]
    pub u_critical: f64,
    pub alpha_critical: f64,
    pub k_critical: Complex64,
    /// Poles or trajectories entering the event.
    pub participants: Vec<String>,
    /// Trajectories leaving the event (empty for collisions).
    pub products: Vec<String>,
    /// False when the critical point could not be pinned down; the bracket
    /// then holds the surviving strength interval.
    pub resolved: bool,
    pub bracket: (f64, f64),
    /// Normalized `|(D, dD/dk)|` at the critical point.
    pub residual: f64,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PoleClass {
    Bound,
    Antibound,
    Resonance,
    Antiresonance,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TraceError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("step underflow at alpha = {alpha}, k = {k}{}", label_suffix(.label))]
    StepUnderflow { alpha: f64, k: Complex64, label: Option<PoleLabel> },
    #[error("homotopy lost pole {label} at Ubar = {ubar}")]
    LostPole { label: PoleLabel, ubar: f64 },
    #[error("pole {0} is not available at this strength")]
    MissingPole(PoleLabel),
    #[error("upper half-plane pole off the imaginary axis at k = {0}")]
    Unphysical(Complex64),
    #[error("topology ambiguous at U = {u}: {reason}")]
    AmbiguousEndpoint { u: f64, reason: String },
    #[error("invalid request: {0}")]
    Invalid(String),
}

fn label_suffix(label: &Option<PoleLabel>) -> String {
    match label {
        Some(l) => format!(" (pole {l})"),
        None => String::new(),
    }
}

/// Kind of a verified pole; `axis_tol` in MeV (default 1e-6).
pub fn classify_pole(k: Complex64, axis_tol: f64) -> Result<PoleClass, TraceError> {
    if k.re.abs() < axis_tol {
        return Ok(if k.im > 0.0 { PoleClass::Bound } else { PoleClass::Antibound });
    }
    if k.im >= 0.0 {
        return Err(TraceError::Unphysical(k));
    }
    Ok(if k.re > 0.0 { PoleClass::Resonance } else { PoleClass::Antiresonance })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        let c = |re, im| Complex64::new(re, im);
        assert_eq!(classify_pole(c(0.0, 50.0), 1e-6).unwrap(), PoleClass::Bound);
        assert_eq!(classify_pole(c(0.0, -70.0), 1e-6).unwrap(), PoleClass::Antibound);
        assert_eq!(classify_pole(c(100.0, -30.0), 1e-6).unwrap(), PoleClass::Resonance);
        assert_eq!(classify_pole(c(-100.0, -30.0), 1e-6).unwrap(), PoleClass::Antiresonance);
        assert!(classify_pole(c(10.0, 5.0), 1e-6).is_err());
    }

    #[test]
    fn labels_parse() {
        assert_eq!("A3".parse::<PoleLabel>().unwrap(), PoleLabel::a(3));
        assert_eq!(PoleLabel::r(12).to_string(), "R12");
        assert!("B1".parse::<PoleLabel>().is_err());
        assert!("A0".parse::<PoleLabel>().is_err());
    }
}
