use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use distinction::characters::Setting;
use distinction::cli::standard_suite;
use distinction::localfield::ExtType;
use distinction::prasad::sweep;

fn bench_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("prasad_sweep");
    group.sample_size(10);
    for spec in standard_suite() {
        let s = Setting::new(spec).expect("standard config");
        let ext = match spec.ext {
            ExtType::Unramified => "unram",
            ExtType::Ramified { .. } => "ram",
        };
        let id = format!("p{}_{ext}_ell{}", spec.p, spec.ell);
        for (mode, parallel) in [("seq", false), ("par", true)] {
            group.bench_with_input(BenchmarkId::new(mode, &id), &s, |b, s| {
                b.iter(|| black_box(sweep(s, parallel).unwrap().total))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_sweep);
criterion_main!(benches);
