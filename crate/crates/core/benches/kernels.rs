//! Parallel vs sequential kernels: sparse Hamiltonian action, Hamiltonian
//! assembly, and one Krylov step. Build with `--no-default-features` to
//! time the sequential fallback end to end; with the default features
//! each group also runs the same kernel on a one-thread pool.

use std::hint::black_box;
use std::sync::Arc;

use bosegas::fock::{build_hamiltonian, product_state, FockBasis, ModeBasis, Orbital, PotentialShape, TwoBodyKernel};
use bosegas::propagator::{expm_apply, PropagatorConfig};
use bosegas::{Coupling, TorusGrid, C64};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn setup(n: usize, k: usize) -> (Arc<FockBasis>, TwoBodyKernel) {
    let grid = TorusGrid::new(2.0 * std::f64::consts::PI, 64).unwrap();
    let modes = ModeBasis::new(&grid, k).unwrap();
    let kernel = TwoBodyKernel::new(PotentialShape::Gaussian, 0.2, &modes).unwrap();
    (Arc::new(FockBasis::new(n, &modes).unwrap()), kernel)
}

/// Runs `f` on a single-thread pool, i.e. the parallel code path without
/// any parallelism.
#[cfg(feature = "parallel")]
fn one_thread<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(f)
}

const SIZES: &[(usize, usize)] = &[(4, 8), (6, 8), (8, 8)];

fn apply(c: &mut Criterion) {
    let mut group = c.benchmark_group("hamiltonian_apply");
    for &(n, k) in SIZES {
        let (basis, kernel) = setup(n, k);
        let h = build_hamiltonian(&basis, &kernel, Coupling::Repulsive);
        let x: Vec<C64> = (0..h.dim()).map(|i| C64::new((i as f64).sin(), (i as f64).cos())).collect();
        let id = format!("N{n}_K{k}_dim{}", h.dim());
        group.bench_with_input(BenchmarkId::new("apply", &id), &x, |b, x| b.iter(|| h.apply(black_box(x))));
        group.bench_with_input(BenchmarkId::new("apply_serial", &id), &x, |b, x| {
            b.iter(|| h.apply_serial(black_box(x)))
        });
    }
    group.finish();
}

fn assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("hamiltonian_assembly");
    group.sample_size(10);
    for &(n, k) in SIZES {
        let (basis, kernel) = setup(n, k);
        let id = format!("N{n}_K{k}_dim{}", basis.dim());
        group.bench_function(BenchmarkId::new("default_pool", &id), |b| {
            b.iter(|| build_hamiltonian(black_box(&basis), &kernel, Coupling::Repulsive))
        });
        #[cfg(feature = "parallel")]
        group.bench_function(BenchmarkId::new("one_thread", &id), |b| {
            b.iter(|| one_thread(|| build_hamiltonian(black_box(&basis), &kernel, Coupling::Repulsive)))
        });
    }
    group.finish();
}

fn krylov_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("krylov_step");
    group.sample_size(10);
    let (basis, kernel) = setup(8, 8);
    let h = build_hamiltonian(&basis, &kernel, Coupling::Repulsive);
    let phi = Orbital::new((0..8).map(|p| C64::new(1.0 / (1.0 + p as f64), 0.3)).collect()).unwrap();
    let state = product_state(&phi, &basis).unwrap();
    let cfg = PropagatorConfig::with_dt(0.01);
    group.bench_function("default_pool", |b| b.iter(|| expm_apply(&h, black_box(&state), 0.01, &cfg).unwrap()));
    #[cfg(feature = "parallel")]
    group.bench_function("one_thread", |b| {
        b.iter(|| one_thread(|| expm_apply(&h, black_box(&state), 0.01, &cfg).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, apply, assembly, krylov_step);
criterion_main!(benches);
