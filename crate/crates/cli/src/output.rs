//! CSV and JSON emitters with matching parsers. Floats are written with 17
//! significant digits, so parse followed by re-emission is byte-identical.

use std::collections::BTreeMap;

use num_complex::Complex64;
use phasepole::potentials::PotentialSpec;
use phasepole::tracer::{AxisFlow, EventRecord, LabelAt, PhasePoint, SweepResult, Trajectory};
use serde::de::{DeserializeOwned, IntoDeserializer};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("line {line}: {reason}")]
    Field { line: usize, reason: String },
    #[error("missing header field {0:?}")]
    MissingHeader(&'static str),
}

fn field(line: usize, reason: impl Into<String>) -> ParseError {
    ParseError::Field { line, reason: reason.into() }
}

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_num(s: &str, line: usize) -> Result<f64, ParseError> {
    s.trim().parse::<f64>().map_err(|e| field(line, format!("{s:?}: {e}")))
}

/// Unit-variant enum from its name.
fn parse_name<T: DeserializeOwned>(s: &str, line: usize) -> Result<T, ParseError> {
    let de: serde::de::value::StrDeserializer<'_, serde::de::value::Error> = s.into_deserializer();
    T::deserialize(de).map_err(|e| field(line, e.to_string()))
}

fn name<T: std::fmt::Debug>(x: &T) -> String {
    format!("{x:?}")
}

fn join(items: &[String], sep: &str) -> String {
    items.join(sep)
}

fn split(s: &str, sep: &str) -> Vec<String> {
    if s.is_empty() {
        Vec::new()
    } else {
        s.split(sep).map(str::to_owned).collect()
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 csv")
}

fn csv_reader(body: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(body.as_bytes())
}

// ---- trajectories ----

pub fn trajectory_csv(t: &Trajectory) -> String {
    let s = &t.spec;
    let labels: Vec<String> = t.labels.iter().map(|l| format!("{}@{}", l.label, num(l.alpha))).collect();
    let windings: Vec<String> = t.windings.iter().map(|(n, w)| format!("{n}:{w}")).collect();
    let mut out = String::new();
    out.push_str("# phasepole trajectory; momenta and strengths in MeV, r0 in MeV^-1\n");
    out.push_str(&format!("# family = {:?}\n", s.family));
    out.push_str(&format!("# U = {}\n# r0 = {}\n# c = {}\n# l = {}\n# m = {}\n", num(s.u), num(s.r0), num(s.c), s.l, num(s.m)));
    out.push_str(&format!("# periodicity = {:?}\n", t.periodicity));
    out.push_str(&format!("# labels = {}\n", labels.join(" ")));
    out.push_str(&format!("# windings = {}\n", windings.join(" ")));
    let mut w = csv_writer();
    w.write_record(["alpha", "re_k", "im_k"]).expect("write");
    for p in &t.points {
        w.write_record([num(p.alpha), num(p.k.re), num(p.k.im)]).expect("write");
    }
    out + &finish(w)
}

pub fn parse_trajectory_csv(text: &str) -> Result<Trajectory, ParseError> {
    let mut head: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(rest) = line.strip_prefix("# ") {
            if let Some((k, v)) = rest.split_once(" = ") {
                head.insert(k, (i + 1, v));
            } else if let Some(k) = rest.strip_suffix(" =") {
                head.insert(k, (i + 1, ""));
            }
        }
    }
    let get = |k: &'static str| head.get(k).copied().ok_or(ParseError::MissingHeader(k));
    let (ln, fam) = get("family")?;
    let spec = PotentialSpec {
        family: parse_name(fam, ln)?,
        u: parse_num(get("U")?.1, get("U")?.0)?,
        r0: parse_num(get("r0")?.1, get("r0")?.0)?,
        c: parse_num(get("c")?.1, get("c")?.0)?,
        l: get("l")?.1.parse().map_err(|_| field(get("l").map(|x| x.0).unwrap_or(0), "bad l"))?,
        m: parse_num(get("m")?.1, get("m")?.0)?,
    };
    let (ln, per) = get("periodicity")?;
    let periodicity = parse_name(per, ln)?;
    let (ln, labs) = get("labels")?;
    let labels = split(labs, " ")
        .iter()
        .map(|s| {
            let (l, a) = s.split_once('@').ok_or_else(|| field(ln, format!("bad label {s:?}")))?;
            Ok(LabelAt { alpha: parse_num(a, ln)?, label: l.parse().map_err(|e: String| field(ln, e))? })
        })
        .collect::<Result<Vec<_>, ParseError>>()?;
    let (ln, wind) = get("windings")?;
    let windings = split(wind, " ")
        .iter()
        .map(|s| {
            let (n, w) = s.split_once(':').ok_or_else(|| field(ln, format!("bad winding {s:?}")))?;
            Ok((n.parse().map_err(|_| field(ln, "bad index"))?, w.parse().map_err(|_| field(ln, "bad winding"))?))
        })
        .collect::<Result<BTreeMap<u32, i64>, ParseError>>()?;
    let mut points = Vec::new();
    for (i, rec) in csv_reader(text).records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(i + 1, |p| p.line() as usize);
        if rec.len() != 3 {
            return Err(field(line, "expected alpha,re_k,im_k"));
        }
        points.push(PhasePoint {
            alpha: parse_num(&rec[0], line)?,
            k: Complex64::new(parse_num(&rec[1], line)?, parse_num(&rec[2], line)?),
        });
    }
    Ok(Trajectory { spec, points, periodicity, labels, windings })
}

pub fn to_json<T: serde::Serialize>(x: &T) -> String {
    serde_json::to_string_pretty(x).expect("serializable") + "\n"
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T, ParseError> {
    Ok(serde_json::from_str(text)?)
}

// ---- events ----

const EVENT_COLUMNS: [&str; 12] = [
    "kind",
    "U_critical",
    "alpha_critical",
    "re_k",
    "im_k",
    "participants",
    "products",
    "status",
    "bracket_lo",
    "bracket_hi",
    "residual",
    "notes",
];

pub fn events_csv(events: &[EventRecord]) -> String {
    let head = "# phasepole events; U, k and brackets in MeV, alpha in rad\n";
    let mut w = csv_writer();
    w.write_record(EVENT_COLUMNS).expect("write");
    for e in events {
        w.write_record([
            name(&e.kind),
            num(e.u_critical),
            num(e.alpha_critical),
            num(e.k_critical.re),
            num(e.k_critical.im),
            join(&e.participants, " "),
            join(&e.products, " "),
            if e.resolved { "resolved".into() } else { "UNRESOLVED".into() },
            num(e.bracket.0),
            num(e.bracket.1),
            num(e.residual),
            join(&e.notes, " | "),
        ])
        .expect("write");
    }
    head.to_owned() + &finish(w)
}

pub fn parse_events_csv(text: &str) -> Result<Vec<EventRecord>, ParseError> {
    let mut out = Vec::new();
    for (i, rec) in csv_reader(text).records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(i + 2, |p| p.line() as usize);
        if rec.len() != EVENT_COLUMNS.len() {
            return Err(field(line, format!("expected {} columns", EVENT_COLUMNS.len())));
        }
        out.push(EventRecord {
            kind: parse_name(&rec[0], line)?,
            u_critical: parse_num(&rec[1], line)?,
            alpha_critical: parse_num(&rec[2], line)?,
            k_critical: Complex64::new(parse_num(&rec[3], line)?, parse_num(&rec[4], line)?),
            participants: split(&rec[5], " "),
            products: split(&rec[6], " "),
            resolved: match &rec[7] {
                "resolved" => true,
                "UNRESOLVED" => false,
                s => return Err(field(line, format!("bad status {s:?}"))),
            },
            bracket: (parse_num(&rec[8], line)?, parse_num(&rec[9], line)?),
            residual: parse_num(&rec[10], line)?,
            notes: split(&rec[11], " | "),
        });
    }
    Ok(out)
}

// ---- sweeps ----

/// Rows `(Ubar, pole_id, kappa)`; `kappa` is empty where the pole is off
/// the axis.
pub fn flows_csv(r: &SweepResult) -> String {
    let head = "# phasepole axis flows; Ubar and kappa (k = i kappa) in MeV\n";
    let mut w = csv_writer();
    w.write_record(["Ubar", "pole_id", "kappa"]).expect("write");
    for (i, u) in r.ubar.iter().enumerate() {
        for f in &r.flows {
            let k = f.kappa[i].map(num).unwrap_or_default();
            w.write_record([num(*u), f.label.to_string(), k]).expect("write");
        }
    }
    head.to_owned() + &finish(w)
}

/// Inverse of [`flows_csv`]; events come from the collision file.
pub fn parse_flows_csv(text: &str, events: Vec<EventRecord>) -> Result<SweepResult, ParseError> {
    let mut ubar: Vec<f64> = Vec::new();
    let mut flows: Vec<AxisFlow> = Vec::new();
    for (i, rec) in csv_reader(text).records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(i + 2, |p| p.line() as usize);
        let u = parse_num(&rec[0], line)?;
        if ubar.last().is_none_or(|&l| l.to_bits() != u.to_bits()) {
            ubar.push(u);
        }
        let label = rec[1].parse().map_err(|e: String| field(line, e))?;
        let kappa = if rec[2].is_empty() { None } else { Some(parse_num(&rec[2], line)?) };
        let slot = match flows.iter().position(|f| f.label == label) {
            Some(j) => j,
            None => {
                flows.push(AxisFlow { label, kappa: Vec::new() });
                flows.len() - 1
            }
        };
        flows[slot].kappa.push(kappa);
    }
    Ok(SweepResult { ubar, flows, events })
}
