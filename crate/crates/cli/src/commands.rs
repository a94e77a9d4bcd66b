use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use phasepole::par::{self, Exec};
use phasepole::potentials::{Family, PotentialSpec};
use phasepole::tracer::{detect_events_with, sweep_real_strength, EventRecord, PoleLabel, SweepResult, Trajectory, Tracer};
use phasepole::verify::{run_all, Criterion};
use thiserror::Error;

use crate::config::{ConfigError, Format, RunConfig};
use crate::output::{events_csv, flows_csv, num, to_json, trajectory_csv};
use crate::svg::{flows_svg, trajectories_svg};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io { .. } => 1,
        }
    }
}

fn write(path: &Path, text: &str) -> Result<PathBuf, CliError> {
    let io = |source| CliError::Io { path: path.into(), source };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    std::fs::write(path, text).map_err(io)?;
    Ok(path.into())
}

fn ext(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

/// `fig.svg` becomes `fig_U4.2.svg` when one config covers several strengths.
fn svg_path(base: &Path, u: f64, several: bool) -> PathBuf {
    if !several {
        return base.into();
    }
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("plot");
    base.with_file_name(format!("{stem}_U{u}.svg"))
}

fn default_labels(spec: &PotentialSpec, tracer: &Tracer, n_max: u32) -> Vec<PoleLabel> {
    if spec.family == Family::Square {
        tracer.book.attractive.iter().chain(&tracer.book.repulsive).map(|(l, _)| *l).collect()
    } else {
        (1..=n_max).flat_map(|n| [PoleLabel::a(n), PoleLabel::r(n)]).collect()
    }
}

/// Trajectories at one strength, one per distinct member set, in label order.
pub fn trace_at(cfg: &RunConfig, u: f64) -> Result<Vec<Trajectory>, CliError> {
    let spec = cfg.spec(u)?;
    let n_max = cfg.trace_nmax()?;
    let (a0, a1) = cfg.alpha_span()?;
    let tracer = Tracer::new(spec, cfg.trace_options()?, n_max + 2)
        .map_err(|e| CliError::Numerical(format!("seeding poles at U = {u}: {e}")))?;
    let labels = match cfg.trace_labels()? {
        Some(ls) => ls,
        None => default_labels(&spec, &tracer, n_max),
    };
    let traced = par::map(Exec::default(), &labels, |&l| {
        let shift = l.sector.alpha();
        tracer.trace_label(l, (a0 + shift, a1 + shift))
    });
    let mut out: Vec<Trajectory> = Vec::new();
    for (l, t) in labels.iter().zip(traced) {
        let t = t.map_err(|e| CliError::Numerical(format!("tracing pole {l} at U = {u}: {e}")))?;
        let members = t.members();
        if !out.iter().any(|o| o.members().iter().any(|m| members.contains(m))) {
            out.push(t);
        }
    }
    Ok(out)
}

pub fn cmd_trace(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let us = cfg.strengths()?;
    let fmt = cfg.format();
    let dir = cfg.out_dir();
    let mut written = Vec::new();
    for &u in &us {
        let trajs = trace_at(cfg, u)?;
        for (i, t) in trajs.iter().enumerate() {
            let id = t.identifier().replace(':', "_");
            let path = dir.join(format!("trajectory_U{u}_{:02}_{id}.{}", i + 1, ext(fmt)));
            let text = match fmt {
                Format::Csv => trajectory_csv(t),
                Format::Json => to_json(t),
            };
            written.push(write(&path, &text)?);
        }
        if let Some(base) = &cfg.output.svg {
            let spec = cfg.spec(u)?;
            let cutoff = cfg.trace_options()?.cutoff;
            let n_zero = (cutoff / spec.half_inverse_range()).floor() as u32;
            let zeros = spec.fixed_zeros(n_zero);
            let title = format!("{:?}, U = {u} MeV", spec.family);
            written.push(write(&svg_path(base, u, us.len() > 1), &trajectories_svg(&title, &trajs, &zeros, cutoff))?);
        }
    }
    Ok(written)
}

pub fn sweep(cfg: &RunConfig) -> Result<SweepResult, CliError> {
    let spec = cfg.spec(1.0)?;
    sweep_real_strength(&spec, cfg.sweep_range()?, cfg.sweep_nmax()?, &cfg.sweep_options()?)
        .map_err(|e| CliError::Numerical(format!("sweep: {e}")))
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<(SweepResult, Vec<PathBuf>), CliError> {
    let r = sweep(cfg)?;
    let dir = cfg.out_dir();
    let mut written = Vec::new();
    match cfg.format() {
        Format::Csv => {
            written.push(write(&dir.join("flows.csv"), &flows_csv(&r))?);
            written.push(write(&dir.join("collisions.csv"), &events_csv(&r.events))?);
        }
        Format::Json => written.push(write(&dir.join("sweep.json"), &to_json(&r))?),
    }
    if let Some(p) = &cfg.output.svg {
        let title = format!("{:?} axis flows", cfg.family()?);
        written.push(write(p, &flows_svg(&title, &r))?);
    }
    Ok((r, written))
}

pub fn events(cfg: &RunConfig) -> Result<Vec<EventRecord>, CliError> {
    let spec = cfg.spec(1.0)?;
    detect_events_with(&spec, cfg.events_range()?, cfg.events_nmax()?, &cfg.event_options()?)
        .map_err(|e| CliError::Numerical(format!("event detection: {e}")))
}

pub fn cmd_events(cfg: &RunConfig) -> Result<(Vec<EventRecord>, Vec<PathBuf>), CliError> {
    let ev = events(cfg)?;
    let dir = cfg.out_dir();
    let text = match cfg.format() {
        Format::Csv => events_csv(&ev),
        Format::Json => to_json(&ev),
    };
    let path = write(&dir.join(format!("events.{}", ext(cfg.format()))), &text)?;
    Ok((ev, vec![path]))
}

/// Human-readable event table, sorted as produced (by `U_critical`).
pub fn event_table(ev: &[EventRecord]) -> String {
    let mut s = format!(
        "{:<22} {:>14} {:>10} {:>12} {:>12}  {}\n",
        "kind", "U_critical", "alpha/pi", "Re k*", "Im k*", "participants"
    );
    for e in ev {
        s.push_str(&format!(
            "{:<22} {:>14.6} {:>10.5} {:>12.4} {:>12.4}  {}",
            format!("{:?}", e.kind),
            e.u_critical,
            e.alpha_critical / PI,
            e.k_critical.re,
            e.k_critical.im,
            e.participants.join(" ")
        ));
        if !e.resolved {
            s.push_str(&format!("  UNRESOLVED [{}, {}]", num(e.bracket.0), num(e.bracket.1)));
        }
        s.push('\n');
    }
    if ev.is_empty() {
        s.push_str("(no events)\n");
    }
    s
}

pub fn cmd_verify(out: Option<&Path>, fmt: Format) -> Result<(Vec<Criterion>, Vec<PathBuf>), CliError> {
    let rows = run_all(Exec::default());
    let mut written = Vec::new();
    if let Some(dir) = out {
        let text = match fmt {
            Format::Json => to_json(&rows),
            Format::Csv => {
                let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
                w.write_record(["id", "name", "measured", "expected", "pass"]).expect("write");
                for r in &rows {
                    w.write_record([r.id.to_string(), r.name.clone(), r.measured.clone(), r.expected.clone(), r.pass.to_string()])
                        .expect("write");
                }
                String::from_utf8(w.into_inner().expect("in-memory")).expect("utf-8")
            }
        };
        written.push(write(&dir.join(format!("verify.{}", ext(fmt))), &text)?);
    }
    Ok((rows, written))
}

pub fn verify_table(rows: &[Criterion]) -> String {
    let mut s = String::new();
    for r in rows {
        s.push_str(&format!(
            "{:>2}  {:<4}  {:<26} measured: {}\n{:>34}expected: {}\n",
            r.id,
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.measured,
            "",
            r.expected
        ));
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    s.push_str(&format!("{} of {} criteria passed\n", rows.len() - failed, rows.len()));
    s
}
