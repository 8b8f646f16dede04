use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qelim::harness::{run_algorithm, Algorithm, RunOptions};
use qelim::{check_sat, exist_elim_with, project, ElimOptions, Variant};
use qelim_bench::{generated, single_block, system};

fn single_blocks(c: &mut Criterion) {
    let mut group = c.benchmark_group("exist_elim");
    let (f, vs) = single_block(4, 8, 3);
    for variant in [Variant::Main, Variant::Mod1, Variant::Mod2] {
        let opts = ElimOptions {
            variant,
            ..ElimOptions::default()
        };
        group.bench_function(BenchmarkId::from_parameter(variant.name()), |b| {
            b.iter(|| exist_elim_with(black_box(&f), &vs, None, &opts).unwrap())
        });
    }
    group.finish();
}

fn nested(c: &mut Criterion) {
    let mut group = c.benchmark_group("depth10_suite");
    group.sample_size(10);
    let suite = generated(10, 10);
    let opts = RunOptions::default();
    for alg in Algorithm::ALL {
        group.bench_function(BenchmarkId::from_parameter(alg.name()), |b| {
            b.iter(|| {
                for (_, f) in &suite {
                    run_algorithm(black_box(f), alg, &opts).unwrap();
                }
            })
        });
    }
    group.finish();
}

fn smt(c: &mut Criterion) {
    let (f, _) = single_block(5, 9, 11);
    c.bench_function("check_sat", |b| b.iter(|| check_sat(black_box(&f)).unwrap()));
}

fn projection(c: &mut Criterion) {
    let s = system(5, 8, 5);
    let vs: Vec<_> = s.vars().into_iter().take(2).collect();
    c.bench_function("project", |b| b.iter(|| project(black_box(&s), &vs)));
}

criterion_group!(benches, single_blocks, nested, smt, projection);
criterion_main!(benches);
