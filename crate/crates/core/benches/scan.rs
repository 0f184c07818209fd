use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use qmont_core::{residual_scan, residual_scan_sequential, QContext, RealFn, SeriesControl};

fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (1..=n)
        .map(|i| a + (b - a) * i as f64 / (n + 1) as f64)
        .collect()
}

fn scan(c: &mut Criterion) {
    let f = RealFn::new("exp(t) + sin(t)", |t: f64| t.exp() + t.sin());
    let control = SeriesControl::default();
    let mut group = c.benchmark_group("residual_scan");
    for q in [0.5, 0.9, 0.99] {
        let ctx = QContext::new(q, 2.0, 4.0).unwrap();
        let xs = grid(2.0, 4.0, 256);
        group.bench_with_input(BenchmarkId::new("parallel", q), &xs, |b, xs| {
            b.iter(|| residual_scan(&f, &ctx, black_box(xs), &control))
        });
        group.bench_with_input(BenchmarkId::new("sequential", q), &xs, |b, xs| {
            b.iter(|| residual_scan_sequential(&f, &ctx, black_box(xs), &control))
        });
    }
    group.finish();
}

criterion_group!(benches, scan);
criterion_main!(benches);
