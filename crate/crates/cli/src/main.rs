use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use phasepole_cli::commands::{cmd_events, cmd_sweep, cmd_trace, cmd_verify, event_table, verify_table, CliError};
use phasepole_cli::config::{parse_span, Format, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "phasepole", version, about = "S-matrix pole trajectories under a phase rotation of the potential")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Trace pole trajectories in alpha; one file per trajectory.
    Trace(RunArgs),
    /// Follow axis poles over a real strength range.
    Sweep(RunArgs),
    /// Locate fusions, rearrangements and loop formations.
    Events(RunArgs),
    /// Run the acceptance suite and print measured against expected values.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory (overrides output.out_dir).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Also draw an SVG plot here.
    #[arg(long, value_name = "PATH")]
    svg: Option<PathBuf>,
    /// Phase span in radians; a trailing `pi` multiplies, e.g. `0:4pi`.
    #[arg(long, value_name = "A:B", value_parser = parse_span, allow_hyphen_values = true)]
    alpha_span: Option<(f64, f64)>,
    /// Strength range in MeV for sweep and events.
    #[arg(long, value_name = "A:B", value_parser = parse_span, allow_hyphen_values = true)]
    u_range: Option<(f64, f64)>,
    /// Highest label index n.
    #[arg(long, value_name = "N")]
    nmax: Option<u32>,
    /// Corrector residual bound while tracing.
    #[arg(long, value_name = "X")]
    tol_residual: Option<f64>,
    /// Trajectory closure tolerance, relative to max(1, |k|).
    #[arg(long, value_name = "X")]
    tol_close: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Also write the report to DIR/verify.{csv,json}.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

fn load(a: &RunArgs) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(&a.config)?;
    cfg.apply(&Overrides {
        out: a.out.clone(),
        format: a.format,
        svg: a.svg.clone(),
        alpha_span: a.alpha_span,
        u_range: a.u_range,
        n_max: a.nmax,
        tol_residual: a.tol_residual,
        tol_close: a.tol_close,
    });
    Ok(cfg)
}

fn list(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.cmd {
        Cmd::Trace(a) => list(&cmd_trace(&load(&a)?)?),
        Cmd::Sweep(a) => {
            let (r, paths) = cmd_sweep(&load(&a)?)?;
            print!("{}", event_table(&r.events));
            list(&paths);
        }
        Cmd::Events(a) => {
            let (ev, paths) = cmd_events(&load(&a)?)?;
            print!("{}", event_table(&ev));
            list(&paths);
        }
        Cmd::Verify(a) => {
            let (rows, paths) = cmd_verify(a.out.as_deref(), a.format)?;
            print!("{}", verify_table(&rows));
            list(&paths);
            return Ok(rows.iter().all(|r| r.pass));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
