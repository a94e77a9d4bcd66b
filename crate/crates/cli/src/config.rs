//! Run configuration: a TOML file with `[potential]`, `[trace]`, `[sweep]`,
//! `[events]`, `[tolerances]` and `[output]` sections, plus flag overrides.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use phasepole::potentials::{Family, PotentialSpec, DEFAULT_MASS, DEFAULT_R0};
use phasepole::tracer::{EventOptions, PoleLabel, SweepOptions, TraceOptions};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config {path}: {source}")]
    Parse { path: PathBuf, source: Box<toml::de::Error> },
    #[error("invalid {what}: {reason}")]
    Invalid { what: String, reason: String },
}

fn invalid(what: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { what: what.into(), reason: reason.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// One strength or a list; traces run once per entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Strengths {
    One(f64),
    Many(Vec<f64>),
}

impl Strengths {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Strengths::One(u) => vec![*u],
            Strengths::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSection {
    /// exponential, hulthen, generalized_hulthen or square.
    pub family: String,
    #[serde(rename = "U", default)]
    pub u: Option<Strengths>,
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default)]
    pub l: u32,
    #[serde(default = "default_r0")]
    pub r0: f64,
    #[serde(default = "default_mass")]
    pub m: f64,
}

fn default_r0() -> f64 {
    DEFAULT_R0
}

fn default_mass() -> f64 {
    DEFAULT_MASS
}

fn default_nmax() -> u32 {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct TraceSection {
    /// Attractive labels start at `alpha_span[0]` (a multiple of 2 pi),
    /// repulsive labels half a turn later.
    pub alpha_span: Option<[f64; 2]>,
    /// Labels to trace, e.g. `["A1", "R2"]`; default all up to `n_max`.
    pub labels: Option<Vec<String>>,
    pub n_max: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub u_range: Option<[f64; 2]>,
    pub step: Option<f64>,
    pub n_max: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct EventsSection {
    pub u_range: Option<[f64; 2]>,
    pub n_max: Option<u32>,
    pub scan_step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSection {
    /// Corrector residual bound while tracing.
    pub tol_residual: Option<f64>,
    /// Trajectory closure tolerance, relative to `max(1, |k|)`.
    pub tol_close: Option<f64>,
    /// Degeneracy residual bound for resolved events.
    pub event_residual: Option<f64>,
    /// Event bracket width in `U` (MeV).
    pub bracket: Option<f64>,
    /// Open-trajectory truncation radius (MeV).
    pub cutoff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub format: Option<Format>,
    pub out_dir: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PotentialSection,
    #[serde(default)]
    pub trace: TraceSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub events: EventsSection,
    #[serde(default)]
    pub tolerances: ToleranceSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// Flag values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub svg: Option<PathBuf>,
    pub alpha_span: Option<(f64, f64)>,
    pub u_range: Option<(f64, f64)>,
    pub n_max: Option<u32>,
    pub tol_residual: Option<f64>,
    pub tol_close: Option<f64>,
}

/// Parse `A:B`; each side is a number, optionally followed by `pi`
/// (`2pi`, `-0.5pi`, `pi`).
pub fn parse_span(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected A:B, got {s:?}"))?;
    Ok((parse_value(a)?, parse_value(b)?))
}

fn parse_value(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let (num, scale) = match t.strip_suffix("pi") {
        Some("") => ("1", PI),
        Some("-") => ("-1", PI),
        Some(r) => (r, PI),
        None => (t, 1.0),
    };
    num.parse::<f64>().map(|x| x * scale).map_err(|e| format!("{s:?}: {e}"))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        Self::parse(&text).map_err(|e| match e {
            ConfigError::Parse { source, .. } => ConfigError::Parse { path: path.into(), source },
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse { path: PathBuf::new(), source: Box::new(e) })
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(p) = &o.out {
            self.output.out_dir = Some(p.clone());
        }
        if let Some(f) = o.format {
            self.output.format = Some(f);
        }
        if let Some(p) = &o.svg {
            self.output.svg = Some(p.clone());
        }
        if let Some((a, b)) = o.alpha_span {
            self.trace.alpha_span = Some([a, b]);
        }
        if let Some((a, b)) = o.u_range {
            self.sweep.u_range = Some([a, b]);
            self.events.u_range = Some([a, b]);
        }
        if let Some(n) = o.n_max {
            self.trace.n_max = Some(n);
            self.sweep.n_max = Some(n);
            self.events.n_max = Some(n);
        }
        if let Some(x) = o.tol_residual {
            self.tolerances.tol_residual = Some(x);
        }
        if let Some(x) = o.tol_close {
            self.tolerances.tol_close = Some(x);
        }
    }

    pub fn family(&self) -> Result<Family, ConfigError> {
        Ok(match self.potential.family.to_ascii_lowercase().replace(['-', ' '], "_").as_str() {
            "exponential" => Family::Exponential,
            "hulthen" => Family::Hulthen,
            "generalized_hulthen" => Family::GeneralizedHulthen,
            "square" | "square_well" => Family::Square,
            other => return Err(invalid("potential.family", format!("unknown family {other:?}"))),
        })
    }

    /// Spec at strength `u`.
    pub fn spec(&self, u: f64) -> Result<PotentialSpec, ConfigError> {
        let family = self.family()?;
        let c = match family {
            Family::Exponential => 0.0,
            Family::Hulthen => -1.0,
            Family::GeneralizedHulthen => {
                self.potential.c.ok_or_else(|| invalid("potential.c", "required for generalized_hulthen"))?
            }
            Family::Square => 0.0,
        };
        let spec = PotentialSpec { family, u, r0: self.potential.r0, c, l: self.potential.l, m: self.potential.m };
        spec.validate().map_err(|e| invalid("potential", e.to_string()))?;
        Ok(spec)
    }

    pub fn strengths(&self) -> Result<Vec<f64>, ConfigError> {
        let us = self.potential.u.as_ref().map(Strengths::values).unwrap_or_default();
        if us.is_empty() {
            return Err(invalid("potential.U", "trace needs at least one strength"));
        }
        for &u in &us {
            self.spec(u)?;
        }
        Ok(us)
    }

    pub fn format(&self) -> Format {
        self.output.format.unwrap_or_default()
    }

    pub fn out_dir(&self) -> PathBuf {
        self.output.out_dir.clone().unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn trace_options(&self) -> Result<TraceOptions, ConfigError> {
        let t = &self.tolerances;
        let mut o = TraceOptions::default();
        set_positive(&mut o.tol_residual, t.tol_residual, "tolerances.tol_residual")?;
        set_positive(&mut o.tol_close, t.tol_close, "tolerances.tol_close")?;
        set_positive(&mut o.cutoff, t.cutoff, "tolerances.cutoff")?;
        Ok(o)
    }

    pub fn event_options(&self) -> Result<EventOptions, ConfigError> {
        let t = &self.tolerances;
        let mut o = EventOptions { trace: self.trace_options()?, ..Default::default() };
        set_positive(&mut o.tol_residual, t.event_residual, "tolerances.event_residual")?;
        set_positive(&mut o.bracket, t.bracket, "tolerances.bracket")?;
        set_positive(&mut o.scan_step, self.events.scan_step, "events.scan_step")?;
        Ok(o)
    }

    pub fn sweep_options(&self) -> Result<SweepOptions, ConfigError> {
        let mut o = SweepOptions::default();
        set_positive(&mut o.step, self.sweep.step, "sweep.step")?;
        set_positive(&mut o.cutoff, self.tolerances.cutoff, "tolerances.cutoff")?;
        Ok(o)
    }

    /// `alpha_span` for attractive labels; default one period from 0.
    pub fn alpha_span(&self) -> Result<(f64, f64), ConfigError> {
        let [a, b] = self.trace.alpha_span.unwrap_or([0.0, 2.0 * PI]);
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(invalid("alpha_span", format!("({a}, {b}) must be finite and increasing")));
        }
        let turns = a / (2.0 * PI);
        if (turns - turns.round()).abs() > 1e-12 {
            return Err(invalid("alpha_span", format!("start {a} must be a multiple of 2 pi")));
        }
        Ok((a, b))
    }

    pub fn trace_labels(&self) -> Result<Option<Vec<PoleLabel>>, ConfigError> {
        let Some(ls) = &self.trace.labels else { return Ok(None) };
        ls.iter()
            .map(|s| s.parse::<PoleLabel>().map_err(|e| invalid("trace.labels", format!("{s:?}: {e}"))))
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    pub fn trace_nmax(&self) -> Result<u32, ConfigError> {
        nmax(self.trace.n_max, "trace.n_max")
    }

    pub fn sweep_nmax(&self) -> Result<u32, ConfigError> {
        nmax(self.sweep.n_max, "sweep.n_max")
    }

    pub fn events_nmax(&self) -> Result<u32, ConfigError> {
        nmax(self.events.n_max, "events.n_max")
    }

    pub fn sweep_range(&self) -> Result<(f64, f64), ConfigError> {
        range(self.sweep.u_range, "sweep.u_range", false)
    }

    pub fn events_range(&self) -> Result<(f64, f64), ConfigError> {
        range(self.events.u_range, "events.u_range", true)
    }
}

fn nmax(n: Option<u32>, what: &str) -> Result<u32, ConfigError> {
    match n.unwrap_or_else(default_nmax) {
        0 => Err(invalid(what, "must be at least 1")),
        n => Ok(n),
    }
}

fn range(r: Option<[f64; 2]>, what: &str, positive: bool) -> Result<(f64, f64), ConfigError> {
    let [a, b] = r.ok_or_else(|| invalid(what, "missing"))?;
    if !(a.is_finite() && b.is_finite() && b > a) || (positive && a <= 0.0) {
        return Err(invalid(what, format!("({a}, {b}) must be finite, increasing{}", if positive { " and positive" } else { "" })));
    }
    Ok((a, b))
}

fn set_positive(slot: &mut f64, value: Option<f64>, what: &str) -> Result<(), ConfigError> {
    if let Some(x) = value {
        if !(x > 0.0 && x.is_finite()) {
            return Err(invalid(what, format!("{x} must be positive")));
        }
        *slot = x;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spans_accept_multiples_of_pi() {
        assert_eq!(parse_span("0:2pi").unwrap(), (0.0, 2.0 * PI));
        assert_eq!(parse_span("-pi:pi").unwrap(), (-PI, PI));
        assert_eq!(parse_span("1.5:40").unwrap(), (1.5, 40.0));
        assert!(parse_span("3").is_err());
    }

    #[test]
    fn overrides_win() {
        let mut c = RunConfig::parse("[potential]\nfamily = \"hulthen\"\nU = 10\n[tolerances]\ntol_close = 1e-5\n").unwrap();
        c.apply(&Overrides { tol_close: Some(1e-7), n_max: Some(2), ..Default::default() });
        assert_eq!(c.trace_options().unwrap().tol_close, 1e-7);
        assert_eq!(c.trace_nmax().unwrap(), 2);
    }

    #[test]
    fn rejects_bad_values() {
        let c = RunConfig::parse("[potential]\nfamily = \"hulthen\"\nU = 10\n[tolerances]\ntol_close = -1\n").unwrap();
        assert!(c.trace_options().is_err());
        let c = RunConfig::parse("[potential]\nfamily = \"generalized_hulthen\"\nU = 10\nc = 1.0\n").unwrap();
        assert!(c.strengths().is_err());
        assert!(RunConfig::parse("[potential]\nfamily = \"hulthen\"\nbogus = 1\n").is_err());
    }
}
