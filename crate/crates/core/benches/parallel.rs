use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use frontlab::boundedness::{blowup_probe, ProbeConfig, ProbeScalar};
use frontlab::catalog;
use frontlab::frontal::{trace_both, FrontalSurface, TraceConfig};
use frontlab::invariants::first_kind_profile;
use frontlab::par::Execution;

fn surface(name: &str) -> FrontalSurface {
    FrontalSurface::resolve(&catalog::get(name).unwrap().spec()).unwrap()
}

fn probe(c: &mut Criterion) {
    let s = surface("five_halves");
    let mut group = c.benchmark_group("blowup_probe");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        let cfg = ProbeConfig { thetas: 180, exec, ..ProbeConfig::default() };
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &cfg, |b, cfg| {
            b.iter(|| blowup_probe(&s, ProbeScalar::H, [0.0, 0.0], cfg).unwrap())
        });
    }
    group.finish();
}

fn profile(c: &mut Criterion) {
    let s = surface("cuspidal_cross_cap");
    let cfg = TraceConfig { step: 0.01, max_samples: 200, refine: false };
    let samples = trace_both(&s, [0.2, 0.0], &cfg).unwrap().samples;
    let mut group = c.benchmark_group("first_kind_profile");
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &samples, |b, samples| {
            b.iter(|| first_kind_profile(&s, samples, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, probe, profile);
criterion_main!(benches);
