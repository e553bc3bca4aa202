//! Parallel vs sequential throughput of the data-parallel kernels.
//!
//! With the default `parallel` feature the same kernels are timed on the
//! global rayon pool and on a single-thread pool; building with
//! `--no-default-features` benches the plain sequential fallback.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use lz_zeno::antiadiabatic::{dp_min_fresnel, default_fresnel_grid};
use lz_zeno::dp_exact::{build_tables, GridSpec};
use lz_zeno::lz_core::{Coupling, EvolutionTable};

fn bench_evolution_table(c: &mut Criterion) {
    let coupling = Coupling::new(1.0).unwrap();
    let mut group = c.benchmark_group("evolution_table_build");
    group.sample_size(10);
    run_modes(&mut group, "extent20", || {
        EvolutionTable::build(&coupling, 20.0, 0.01).unwrap()
    });
    group.finish();
}

fn bench_dp_levels(c: &mut Criterion) {
    let coupling = Coupling::new(1.0).unwrap();
    let grid = GridSpec::new(-15.0, 15.0, 0.01).unwrap();
    let mut group = c.benchmark_group("dp_build_tables");
    group.sample_size(10);
    run_modes(&mut group, "n3_grid15", || build_tables(&coupling, 3, &grid).unwrap());
    group.finish();
}

fn bench_fresnel_dp(c: &mut Criterion) {
    let grid = default_fresnel_grid();
    let mut group = c.benchmark_group("fresnel_dp");
    group.sample_size(10);
    run_modes(&mut group, "n10", || dp_min_fresnel(10, &grid).unwrap());
    group.finish();
}

#[cfg(feature = "parallel")]
fn run_modes<R>(
    group: &mut criterion::BenchmarkGroup<'_, criterion::measurement::WallTime>,
    name: &str,
    f: impl Fn() -> R,
) {
    group.bench_function(BenchmarkId::new("parallel", name), |b| b.iter(&f));
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    group.bench_function(BenchmarkId::new("sequential", name), |b| {
        b.iter(|| pool.install(&f))
    });
}

#[cfg(not(feature = "parallel"))]
fn run_modes<R>(
    group: &mut criterion::BenchmarkGroup<'_, criterion::measurement::WallTime>,
    name: &str,
    f: impl Fn() -> R,
) {
    group.bench_function(BenchmarkId::new("sequential_fallback", name), |b| b.iter(&f));
}

criterion_group!(benches, bench_evolution_table, bench_dp_levels, bench_fresnel_dp);
criterion_main!(benches);
