use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use fibstat::convergence::{fsc_ifn_test, fsca_ifn_test, AnchorStrategy};
use fibstat::density::{density_profile, geometric_grid};
use fibstat::fib_core::{fhat_apply, fhat_invert, Arithmetic};
use fibstat::{standard_ifn, IndexSet, NormedSpace, TestParams};
use fibstat_bench::fixture;

fn fhat(c: &mut Criterion) {
    let mut group = c.benchmark_group("fhat");
    for n in [1_000usize, 100_000] {
        let x = fixture(&format!("harmonic_perturbed:c=1,amp=0.5,domain=terms:{n}")).values;
        group.bench_with_input(BenchmarkId::new("apply", n), &x, |b, x| {
            b.iter(|| fhat_apply(black_box(x)).unwrap())
        });
    }
    let y = fixture("const:c=1:200").values;
    group.bench_function("invert_exact_200", |b| {
        b.iter(|| fhat_invert(black_box(&y), Arithmetic::Exact).unwrap())
    });
    group.finish();
}

fn density(c: &mut Criterion) {
    let n = 1_000_000;
    let squares = IndexSet::squares(n);
    let grid = geometric_grid(n);
    let cfg = Default::default();
    c.bench_function("density_profile_squares_1e6", |b| {
        b.iter(|| density_profile(black_box(&squares), &grid, &cfg).unwrap())
    });
}

fn classifiers(c: &mut Criterion) {
    let subject = fixture("square_spikes:c=2,amp=3,seed=1:100000");
    let ifn = standard_ifn(NormedSpace::real_line());
    let params = TestParams::single(0.5, 1.0);
    c.bench_function("fsc_ifn_1e5", |b| {
        b.iter(|| fsc_ifn_test(black_box(&subject), &ifn, &params).unwrap())
    });
    c.bench_function("fsca_ifn_1e5", |b| {
        b.iter(|| fsca_ifn_test(black_box(&subject), &ifn, &params, AnchorStrategy::default()).unwrap())
    });
}

criterion_group!(benches, fhat, density, classifiers);
criterion_main!(benches);
