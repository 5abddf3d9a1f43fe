//! Criterion benchmarks for the substeps and the split driver.

use std::hint::black_box;

use abers_core::substeps::CnRelaxation;
use abers_core::{
    burgers_substep, rectangle_convolution, spectral_relaxation_exact, split_evolve, thomas_solve,
    Field, GridSpec, InitialData, KernelSpec, MixedTerm, PhysicalParams, SplitSchedule,
    TridiagonalSystem,
};
use criterion::{BenchmarkId, Criterion, Throughput};

/// Gaussian of unit width and height on `[-L/2, L/2]` with `n` cells.
pub fn fixture(n: usize) -> Field {
    let half = n as f64 * 0.05;
    let grid = GridSpec::new(-half, half, n).expect("grid");
    InitialData::Gaussian {
        center: 0.0,
        width: 1.0,
        amplitude: 1.0,
    }
    .sample(grid)
    .expect("gaussian")
}

const SIZES: [usize; 3] = [1_000, 10_000, 100_000];

pub fn substeps(c: &mut Criterion) {
    let p = PhysicalParams::default();
    let mut group = c.benchmark_group("substeps");
    for n in SIZES {
        let u = fixture(n);
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::new("burgers", n), &u, |b, u| {
            b.iter(|| burgers_substep(black_box(u), &p, 0.05).unwrap())
        });
        let cn = CnRelaxation::new(u.grid(), &p, 0.05, MixedTerm::Centered).unwrap();
        let mut out = vec![0.0; n];
        group.bench_with_input(
            BenchmarkId::new("crank_nicolson_prefactored", n),
            &u,
            |b, u| b.iter(|| cn.apply(black_box(u.values()), &mut out)),
        );
        group.bench_with_input(BenchmarkId::new("spectral_oracle", n), &u, |b, u| {
            b.iter(|| spectral_relaxation_exact(black_box(u), &p, 0.05).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("rectangle_convolution", n), &u, |b, u| {
            b.iter(|| rectangle_convolution(&KernelSpec::Exponential, black_box(u)))
        });
        let sys = TridiagonalSystem::new(
            vec![-1.0; n - 1],
            vec![4.0; n],
            vec![-1.0; n - 1],
            u.values().to_vec(),
        )
        .unwrap();
        group.bench_with_input(BenchmarkId::new("thomas_solve", n), &sys, |b, sys| {
            b.iter(|| thomas_solve(black_box(sys)).unwrap())
        });
    }
    group.finish();
}

pub fn driver(c: &mut Criterion) {
    let p = PhysicalParams::default();
    let u = fixture(1_000);
    let sched = SplitSchedule::new(0.05, 200)
        .unwrap()
        .record_steps(Vec::new());
    let mut group = c.benchmark_group("driver");
    group.sample_size(20);
    group.bench_function("split_200_steps_1000_cells", |b| {
        b.iter(|| split_evolve(black_box(&u), &p, &sched).unwrap())
    });
    group.finish();
}
