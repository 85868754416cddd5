use adaprox::problems::make_bilinear_saddle;
use adaprox::solver::{adaptive_mirror_prox, fixed_mirror_prox, lipschitz_iteration_bound, SolverConfig};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn bilinear(c: &mut Criterion) {
    let mut group = c.benchmark_group("bilinear_solve");
    group.sample_size(10);
    for n in [10, 30, 100] {
        let inst = make_bilinear_saddle(n, n, 1.0, 0).unwrap();
        let l = inst.known_l.unwrap();
        let eps = 1e-2;
        group.bench_with_input(BenchmarkId::new("adaptive", n), &inst, |b, inst| {
            b.iter(|| adaptive_mirror_prox(&inst.oracle, &inst.setup, &SolverConfig::new(eps)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("adaptive_l0_1000x", n), &inst, |b, inst| {
            b.iter(|| adaptive_mirror_prox(&inst.oracle, &inst.setup, &SolverConfig::new(eps).l0(1e3 * l)).unwrap())
        });
        let iters = lipschitz_iteration_bound(l, inst.setup.prox_radius_sq(), eps) as usize;
        group.bench_with_input(BenchmarkId::new("fixed_known_l", n), &inst, |b, inst| {
            b.iter(|| fixed_mirror_prox(&inst.oracle, &inst.setup, l, iters, false).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bilinear);
criterion_main!(benches);
