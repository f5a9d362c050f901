use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use spinc_core::exterior::ModelParams;
use spinc_core::expansion::{build_l02, build_q1, compute_f2};
use spinc_core::numeric::fock::{fock_matrix, NoAtoms};
use spinc_core::numeric::oracle::random_word_trials;
use spinc_core::numeric::{torus_gap_demo, FockBasisSpec, Modes, TorusSpec};
use spinc_core::tensor::RuleSet;

fn symbolic(c: &mut Criterion) {
    let rules = RuleSet::bundled();
    c.bench_function("compute_f2", |b| b.iter(|| compute_f2(black_box(&rules)).unwrap()));
    let (q1, l02) = (build_q1(), build_l02());
    c.bench_function("normal_order_q1_l02_q1", |b| b.iter(|| black_box(&q1.0).mul(&l02.0).mul(&q1.0)));
}

fn numeric(c: &mut Criterion) {
    let spec = FockBasisSpec::new(2, 12, true, Modes::Landau).unwrap();
    let params = ModelParams::standard(2);
    let l02 = build_l02();
    c.bench_function("fock_matrix_l02_n2_cutoff12", |b| {
        b.iter(|| fock_matrix(&l02, black_box(&spec), &params, &NoAtoms).unwrap())
    });
    c.bench_function("oracle_20_words", |b| b.iter(|| random_word_trials(20, 2, black_box(3), 1e-10).unwrap()));
    let mut group = c.benchmark_group("torus");
    group.sample_size(10);
    let torus = TorusSpec::new(3, 64).unwrap();
    group.bench_function("gap_p3_m64", |b| b.iter(|| torus_gap_demo(black_box(&torus)).unwrap()));
    group.finish();
}

criterion_group!(benches, symbolic, numeric);
criterion_main!(benches);
