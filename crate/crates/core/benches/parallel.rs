use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ptcubic::spectral::{scan_real_eigenvalues, verify_upper_half_plane, Rect};
use ptcubic::{Execution, SolverConfig};

fn modes() -> [(&'static str, Execution); 2] {
    [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)]
}

fn grid(c: &mut Criterion) {
    let mut group = c.benchmark_group("half_plane_grid_20x10");
    group.sample_size(10);
    let rect = Rect::new(0.5, 20.0, 0.1, 10.0).unwrap();
    for (name, execution) in modes() {
        let config = SolverConfig { execution, ..SolverConfig::default() };
        group.bench_with_input(BenchmarkId::from_parameter(name), &config, |b, cfg| {
            b.iter(|| verify_upper_half_plane(rect, (20, 10), cfg).unwrap())
        });
    }
    group.finish();
}

fn scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("real_scan_8_levels");
    group.sample_size(10);
    for (name, execution) in modes() {
        let config = SolverConfig { execution, ..SolverConfig::default() };
        group.bench_with_input(BenchmarkId::from_parameter(name), &config, |b, cfg| {
            b.iter(|| scan_real_eigenvalues(8, cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, grid, scan);
criterion_main!(benches);
