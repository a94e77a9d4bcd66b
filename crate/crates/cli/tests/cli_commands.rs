//! End-to-end runs of the `phasepole` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use phasepole::potentials::{hulthen_pole_closed_form, PotentialSpec};
use phasepole::tracer::{EventRecord, SweepResult, Trajectory};
use phasepole_cli::output::{
    events_csv, flows_csv, from_json, parse_events_csv, parse_flows_csv, parse_trajectory_csv, to_json, trajectory_csv,
};
use tempfile::TempDir;

const CLOSED_FORM_TOL: f64 = 1e-6;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phasepole")).args(args).output().expect("spawn phasepole")
}

fn config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn files(dir: &Path, ext: &str) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .collect();
    v.sort();
    v
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout:\n{}\nstderr:\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

const HULTHEN_TRACE: &str = r#"
[potential]
family = "hulthen"
U = 10.0

[trace]
labels = ["A1", "R1"]
"#;

#[test]
fn hulthen_trace_matches_closed_form() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "h.toml", HULTHEN_TRACE);
    let out = tmp.path().join("out");
    ok(&run(&["trace", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]));
    // A1 and R1 lie on one 2 pi trajectory.
    let csvs = files(&out, "csv");
    assert_eq!(csvs.len(), 1, "{csvs:?}");
    let spec = PotentialSpec::hulthen(10.0);
    for (path, n) in csvs.iter().zip([1u32]) {
        let t = parse_trajectory_csv(&fs::read_to_string(path).unwrap()).unwrap();
        assert!(t.points.len() > 10);
        for p in &t.points {
            let want = hulthen_pole_closed_form(n, p.alpha, &spec).unwrap();
            let err = (p.k - want).norm() / want.norm().max(1.0);
            assert!(err < CLOSED_FORM_TOL, "{}: alpha {} k {} vs {}", path.display(), p.alpha, p.k, want);
        }
    }
}

#[test]
fn trajectory_files_round_trip_and_repeat_bitwise() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "h.toml", HULTHEN_TRACE);
    let mut texts = Vec::new();
    for (fmt, run_id) in [("csv", "a"), ("csv", "b"), ("json", "a"), ("json", "b")] {
        let out = tmp.path().join(format!("{fmt}_{run_id}"));
        ok(&run(&["trace", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--format", fmt]));
        let mut here = Vec::new();
        for p in files(&out, fmt) {
            let text = fs::read_to_string(&p).unwrap();
            let again = match fmt {
                "csv" => trajectory_csv(&parse_trajectory_csv(&text).unwrap()),
                _ => to_json(&from_json::<Trajectory>(&text).unwrap()),
            };
            assert_eq!(again, text, "{} does not round-trip", p.display());
            here.push((p.file_name().unwrap().to_owned(), text));
        }
        texts.push(here);
    }
    assert_eq!(texts[0], texts[1], "csv output differs between identical runs");
    assert_eq!(texts[2], texts[3], "json output differs between identical runs");
}

#[test]
fn sweep_and_event_files_round_trip() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(
        tmp.path(),
        "e.toml",
        r#"
[potential]
family = "exponential"

[sweep]
u_range = [-8.0, 2.0]
step = 0.5
n_max = 2

[events]
u_range = [4.0, 4.3]
n_max = 2
"#,
    );
    let c = cfg.to_str().unwrap();
    let csv_dir = tmp.path().join("csv");
    let json_dir = tmp.path().join("json");
    ok(&run(&["sweep", "--config", c, "--out", csv_dir.to_str().unwrap()]));
    ok(&run(&["sweep", "--config", c, "--out", json_dir.to_str().unwrap(), "--format", "json"]));
    ok(&run(&["events", "--config", c, "--out", csv_dir.to_str().unwrap()]));
    ok(&run(&["events", "--config", c, "--out", json_dir.to_str().unwrap(), "--format", "json"]));

    let collisions = fs::read_to_string(csv_dir.join("collisions.csv")).unwrap();
    let col = parse_events_csv(&collisions).unwrap();
    assert_eq!(events_csv(&col), collisions);
    assert_eq!(col.len(), 1, "R1 R2 collide near 4.19 MeV");
    let flows = fs::read_to_string(csv_dir.join("flows.csv")).unwrap();
    assert_eq!(flows_csv(&parse_flows_csv(&flows, col.clone()).unwrap()), flows);
    let sweep = fs::read_to_string(json_dir.join("sweep.json")).unwrap();
    let r: SweepResult = from_json(&sweep).unwrap();
    assert_eq!(to_json(&r), sweep);
    assert_eq!(r.events, col);

    let ev_csv = fs::read_to_string(csv_dir.join("events.csv")).unwrap();
    let ev = parse_events_csv(&ev_csv).unwrap();
    assert_eq!(events_csv(&ev), ev_csv);
    let ev_json = fs::read_to_string(json_dir.join("events.json")).unwrap();
    assert!(ev_json.contains("\"U_critical\""));
    let ev2: Vec<EventRecord> = from_json(&ev_json).unwrap();
    assert_eq!(to_json(&ev2), ev_json);
    assert_eq!(ev, ev2);
    assert!(ev.iter().any(|e| format!("{:?}", e.kind) == "Fusion"), "{ev_csv}");
}

#[test]
fn hulthen_event_table_is_empty() {
    let tmp = TempDir::new().unwrap();
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/events_hulthen.toml");
    let out = tmp.path().join("ev");
    let o = run(&["events", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    ok(&o);
    assert!(String::from_utf8_lossy(&o.stdout).contains("(no events)"));
    let text = fs::read_to_string(out.join("events.csv")).unwrap();
    assert!(parse_events_csv(&text).unwrap().is_empty(), "{text}");
}

#[test]
fn square_well_above_loop_gives_loop_and_open_trajectory() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(
        tmp.path(),
        "sq.toml",
        r#"
[potential]
family = "square"
l = 0
U = 222.0

[trace]
n_max = 1
"#,
    );
    let out = tmp.path().join("sq");
    let svg = out.join("sq.svg");
    ok(&run(&["trace", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--svg", svg.to_str().unwrap()]));
    let mut kinds: Vec<String> = files(&out, "csv")
        .iter()
        .map(|p| {
            let t = parse_trajectory_csv(&fs::read_to_string(p).unwrap()).unwrap();
            format!("{:?}", t.periodicity)
        })
        .collect();
    kinds.sort();
    assert_eq!(kinds, ["FourPi", "Open"]);

    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn svg_marks_landmarks_and_fixed_zeros() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(tmp.path(), "h.toml", HULTHEN_TRACE);
    let svg = tmp.path().join("h.svg");
    let out = tmp.path().join("h");
    ok(&run(&["trace", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--svg", svg.to_str().unwrap()]));
    let s = fs::read_to_string(&svg).unwrap();
    let circles: Vec<&str> = s.lines().filter(|l| l.starts_with("<circle")).collect();
    let open = circles.iter().filter(|l| l.contains(r#"fill="white""#)).count();
    assert_eq!(open, 1, "R1 at alpha = pi is drawn open");
    assert_eq!(circles.len() - open, 2, "A1 at alpha = 0 and 2 pi is drawn filled");
    assert!(s.contains("<path d=\"M"), "fixed zeros are marked");
}

#[test]
fn bad_configs_exit_with_code_two() {
    let tmp = TempDir::new().unwrap();
    let missing = tmp.path().join("nope.toml");
    let o = run(&["trace", "--config", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let cases = [
        ("syntax.toml", "[potential\nfamily = 1"),
        ("family.toml", "[potential]\nfamily = \"gaussian\"\nU = 1.0\n"),
        ("unknown.toml", "[potential]\nfamily = \"hulthen\"\nU = 1.0\nspin = 2\n"),
        ("c.toml", "[potential]\nfamily = \"generalized_hulthen\"\nU = 1.0\nc = 1.0\n"),
    ];
    for (name, text) in cases {
        let cfg = config(tmp.path(), name, text);
        let o = run(&["trace", "--config", cfg.to_str().unwrap(), "--out", tmp.path().join("o").to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    }

    let cfg = config(tmp.path(), "ok.toml", HULTHEN_TRACE);
    let o = run(&["events", "--config", cfg.to_str().unwrap(), "--u-range", "5:1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_passes_and_writes_report() {
    let tmp = TempDir::new().unwrap();
    let o = run(&["verify", "--out", tmp.path().to_str().unwrap()]);
    ok(&o);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("10 of 10 criteria passed"), "{stdout}");
    let report = fs::read_to_string(tmp.path().join("verify.csv")).unwrap();
    let rows: Vec<&str> = report.lines().skip(1).collect();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r.ends_with(",true")), "{report}");
}
