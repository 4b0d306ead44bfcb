use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use vfinv_core::equivalence::{orbit_equivalent, Equation, Mode, Sampling};
use vfinv_core::invariants::{jacobian_adjoint, second_order_invariants, second_order_nonpivots, second_order_pivots};
use vfinv_core::jet::{build_generator, determining_system, invariant_coordinates, prolong, MixedConvention};
use vfinv_core::lie::{coefficient_matrix, symbolic_rank};
use vfinv_core::parse_expr;
use vfinv_core::symbolic::diff_total;

fn normalize(c: &mut Criterion) {
    let e = parse_expr("((A1 / (A2^2 + 1))^2 + 2)^(-2) * (A2_2 - A1) / ((x1 - A1_2)^2 + 1)", 2).unwrap();
    c.bench_function("normalize nested rational", |b| b.iter(|| black_box(&e).normalize().unwrap()));
    c.bench_function("total derivative", |b| b.iter(|| diff_total(black_box(&e), 1).unwrap()));
}

fn prolongation(c: &mut Criterion) {
    let mut g = c.benchmark_group("prolong order 2");
    for n in [2, 3, 4] {
        let gen = build_generator(n).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &gen, |b, gen| {
            b.iter(|| prolong(gen, 2, MixedConvention::Symmetric).unwrap())
        });
    }
    g.finish();
}

fn rank(c: &mut Criterion) {
    let mut g = c.benchmark_group("second-order system rank");
    for n in [2, 3] {
        let ops: Vec<_> =
            determining_system(n, 2, MixedConvention::Symmetric).unwrap().into_iter().map(|s| s.op).collect();
        let m = coefficient_matrix(&ops, &invariant_coordinates(n, 2).unwrap()).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| b.iter(|| symbolic_rank(m).unwrap()));
    }
    g.finish();
}

fn adjoint(c: &mut Criterion) {
    let mut g = c.benchmark_group("adjoint");
    for n in [2, 3] {
        let ops: Vec<_> =
            determining_system(n, 2, MixedConvention::OrderedPairs).unwrap().into_iter().map(|s| s.op).collect();
        let (piv, non) = (second_order_pivots(n), second_order_nonpivots(n).unwrap());
        g.bench_with_input(BenchmarkId::from_parameter(n), &ops, |b, ops| {
            b.iter(|| jacobian_adjoint(ops, &piv, Some(&non)).unwrap())
        });
    }
    g.finish();
}

fn invariants(c: &mut Criterion) {
    c.bench_function("second-order invariants n=3", |b| b.iter(|| second_order_invariants(3).unwrap()));
}

fn orbits(c: &mut Criterion) {
    let a = Equation::parse(2, &["exp(x1)", "1 + x2^2"]).unwrap();
    let b = Equation::parse(2, &["x1 * x2 + 1", "x1^2 + x2"]).unwrap();
    for mode in [Mode::Symbolic, Mode::Numeric] {
        c.bench_function(&format!("orbit test {mode:?}"), |bch| {
            bch.iter(|| orbit_equivalent(&a, &b, mode, Sampling::default()).unwrap())
        });
    }
}

criterion_group!(benches, normalize, prolongation, rank, adjoint, invariants, orbits);
criterion_main!(benches);
