use std::f64::consts::PI;

use phasepole::par::Exec;
use phasepole::potentials::PotentialSpec;
use phasepole::tracer::{signature, EventOptions, Periodicity, PoleLabel, TraceOptions, Tracer};

#[test]
fn mirrored_points_are_poles() {
    // D(k, alpha) = 0 implies D(-k*, -alpha) = 0 for real potentials.
    let spec = PotentialSpec::exponential(12.0);
    let tracer = Tracer::new(spec, TraceOptions::default(), 4).unwrap();
    let t = tracer.trace_label(PoleLabel::a(1), (0.0, 2.0 * PI)).unwrap();
    for p in t.points.iter().step_by(7) {
        let d = spec.pole_condition(-p.k.conj(), -p.alpha).unwrap();
        let scale = spec.pole_condition(-p.k.conj() + 1.0, -p.alpha).unwrap().norm();
        assert!(d.norm() < 1e-8 * scale, "alpha = {}: {}", p.alpha, d.norm());
    }
}

#[test]
fn execution_modes_agree_bitwise() {
    let spec = PotentialSpec::exponential(22.0);
    let par = signature(&spec, 4, &EventOptions { exec: Exec::Parallel, ..Default::default() }).unwrap();
    let seq = signature(&spec, 4, &EventOptions { exec: Exec::Sequential, ..Default::default() }).unwrap();
    assert_eq!(par, seq);
}

#[test]
fn open_square_trajectory_is_truncated_at_cutoff() {
    let spec = PotentialSpec::square(1.0, 0);
    let opts = TraceOptions::default();
    let tracer = Tracer::new(spec, opts, 3).unwrap();
    let t = tracer.trace_label(PoleLabel::a(1), (0.0, 2.0 * PI)).unwrap();
    assert_eq!(t.periodicity, Periodicity::Open);
    let inside = t.points.iter().filter(|p| p.k.norm() <= opts.cutoff).count();
    assert!(t.points.len() - inside <= 2, "points beyond the cutoff: {}", t.points.len() - inside);
}

#[test]
fn fused_trajectory_has_four_pi_period() {
    let spec = PotentialSpec::exponential(5.0);
    let tracer = Tracer::new(spec, TraceOptions::default(), 3).unwrap();
    let t = tracer.trace_label(PoleLabel::a(1), (0.0, 2.0 * PI)).unwrap();
    assert_eq!(t.periodicity, Periodicity::FourPi);
    let m = t.members();
    assert!(m.contains(&PoleLabel::a(2)) && m.contains(&PoleLabel::r(1)), "{}", t.identifier());
}
