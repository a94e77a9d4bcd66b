//! One PASS/FAIL line per acceptance criterion; exits non-zero on any failure.
//! Runs without the libtest harness so the lines are never captured.

use std::process::ExitCode;

use phasepole::par::Exec;
use phasepole::verify::run_all;

fn main() -> ExitCode {
    let rows = run_all(Exec::default());
    for r in &rows {
        println!(
            "[{}] criterion {:>2} {}: measured {} | expected {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.id,
            r.name,
            r.measured,
            r.expected
        );
    }
    let failed: Vec<u32> = rows.iter().filter(|r| !r.pass).map(|r| r.id).collect();
    if rows.len() != 10 || !failed.is_empty() {
        println!("acceptance: {} criteria, failed {failed:?}", rows.len());
        return ExitCode::FAILURE;
    }
    println!("acceptance: all {} criteria passed", rows.len());
    ExitCode::SUCCESS
}
