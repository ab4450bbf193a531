use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use speck_core::eigen::{self, SolverConfig, SpectrumMode};
use speck_core::estimators::{estimate, EstimatorConfig, Method};
use speck_core::graph::degree_stats;
use speck_core::operators::{bethe_hessian, r_moment, reduced_nonbacktracking};
use speck_core::randnet::{sample, BlockModelSpec};
use speck_core::Graph;

fn sbm(n: usize) -> Graph {
    sample(&BlockModelSpec::balanced(n, 4, 0.2, 15.0), 1).unwrap().0
}

fn sampling(c: &mut Criterion) {
    let spec = BlockModelSpec::balanced(1200, 4, 0.2, 15.0);
    c.bench_function("sample_sbm_1200", |b| b.iter(|| sample(&spec, 7).unwrap()));
}

fn symmetric(c: &mut Criterion) {
    let mut group = c.benchmark_group("bethe_hessian");
    group.sample_size(10);
    for n in [300usize, 1200] {
        let g = sbm(n);
        let h = bethe_hessian(&g, r_moment(&g).unwrap()).unwrap().matrix;
        let dense = SolverConfig {
            sym_dense_cutoff: usize::MAX,
            ..SolverConfig::default()
        };
        let krylov = SolverConfig {
            force_iterative: true,
            ..SolverConfig::default()
        };
        group.bench_with_input(BenchmarkId::new("inertia_ldlt", n), &h, |b, h| {
            b.iter(|| eigen::inertia_ldlt(h, 1e-8).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("smallest16_dense", n), &h, |b, h| {
            b.iter(|| eigen::sym_smallest(h, 16, &dense).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("smallest16_lanczos", n), &h, |b, h| {
            b.iter(|| eigen::sym_smallest(h, 16, &krylov).unwrap())
        });
    }
    group.finish();
}

fn nonsymmetric(c: &mut Criterion) {
    let mut group = c.benchmark_group("nonbacktracking");
    group.sample_size(10);
    for n in [150usize, 1200] {
        let g = sbm(n);
        let reduced = reduced_nonbacktracking(&g).unwrap().matrix;
        let abscissa = degree_stats(&g).unwrap().d_tilde.sqrt();
        let mode = SpectrumMode::RightOf { nev: 4, abscissa };
        let krylov = SolverConfig {
            force_iterative: true,
            ..SolverConfig::default()
        };
        group.bench_with_input(BenchmarkId::new("right_of_arnoldi", n), &reduced, |b, m| {
            b.iter(|| eigen::nonsym_spectrum(m, mode, &krylov).unwrap())
        });
        if n <= 150 {
            group.bench_with_input(BenchmarkId::new("full_dense", n), &reduced, |b, m| {
                b.iter(|| eigen::dense_eigenvalues(m).unwrap())
            });
        }
    }
    group.finish();
}

fn estimators(c: &mut Criterion) {
    let mut group = c.benchmark_group("estimate_1200");
    group.sample_size(10);
    let g = sbm(1200);
    let cfg = EstimatorConfig::default();
    for m in Method::ALL {
        group.bench_function(m.name(), |b| b.iter(|| estimate(&g, m, &cfg).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, sampling, symmetric, nonsymmetric, estimators);
criterion_main!(benches);
