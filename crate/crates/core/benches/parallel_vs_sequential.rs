use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use phasepole::par::Exec;
use phasepole::potentials::PotentialSpec;
use phasepole::tracer::{detect_events_with, signature, EventOptions};

fn modes() -> [(&'static str, Exec); 2] {
    [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)]
}

fn bench_signature(c: &mut Criterion) {
    let spec = PotentialSpec::exponential(12.0);
    let mut g = c.benchmark_group("signature_exponential_u12");
    g.sample_size(10);
    for (name, exec) in modes() {
        let opts = EventOptions { exec, ..Default::default() };
        g.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, o| b.iter(|| signature(&spec, 4, o).unwrap()));
    }
    g.finish();
}

fn bench_events(c: &mut Criterion) {
    let spec = PotentialSpec::exponential(1.0);
    let mut g = c.benchmark_group("events_exponential_fusion_window");
    g.sample_size(10);
    for (name, exec) in modes() {
        let opts = EventOptions { exec, ..Default::default() };
        g.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, o| {
            b.iter(|| detect_events_with(&spec, (3.5, 5.0), 2, o).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench_signature, bench_events);
criterion_main!(benches);
