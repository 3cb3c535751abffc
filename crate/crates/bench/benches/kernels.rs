use std::hint::black_box;

use cojam::channel::{sample_gains, Rx};
use cojam::constellation::{sum_entropy_bits, PamSet};
use cojam::decoder::{joint_decode, simulate_errors, GainSource, JointForm};
use cojam::diophantine::{measure_b_grid, min_distance, LinearFormSpec};
use cojam::rng;
use cojam::scheme::{encode, Design, DEFAULT_GAMMA};
use cojam::channel::apply_channel;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_rational::Rational64;

fn joint(c: &mut Criterion) {
    let mut group = c.benchmark_group("joint_decode");
    for m in [8u32, 12, 16] {
        let d = Design::build(Rational64::new(3, 4), m, Rational64::new(1, 10), DEFAULT_GAMMA).unwrap();
        let mut r = rng::stream(1, 0);
        let g = sample_gains(&mut r);
        let tx = encode(&d, &g, &mut r);
        let y = apply_channel(tx.x, &g, &d.cfg, &mut r).y1;
        let rg = g.receiver(Rx::One);
        group.bench_with_input(BenchmarkId::from_parameter(m), &y, |b, &y| {
            b.iter(|| joint_decode(black_box(y), rg, &d))
        });
    }
    group.finish();
}

fn distance(c: &mut Criterion) {
    let d = Design::build(Rational64::new(3, 4), 16, Rational64::new(1, 10), DEFAULT_GAMMA).unwrap();
    let f = JointForm::of(&d).unwrap();
    c.bench_function("min_distance/alpha=3/4,m=16", |b| {
        b.iter(|| min_distance(black_box(3.375), black_box(1.98), f.a0, f.a1, f.q0_max, f.q1_max))
    });
}

fn grid(c: &mut Criterion) {
    let spec = LinearFormSpec::new(4, 1, 6, 12, 0.01, 8).unwrap();
    let mut group = c.benchmark_group("measure_b_grid");
    group.sample_size(10);
    group.bench_function("grid=500", |b| b.iter(|| measure_b_grid(black_box(&spec), 500)));
    group.finish();
}

fn entropy(c: &mut Criterion) {
    let s = PamSet::new(0.1, 10_000).unwrap();
    c.bench_function("sum_entropy/Q=1e4", |b| b.iter(|| sum_entropy_bits(black_box(&s), &s)));
}

fn monte_carlo(c: &mut Criterion) {
    let d = Design::build(Rational64::new(3, 5), 10, Rational64::new(1, 10), DEFAULT_GAMMA).unwrap();
    let mut group = c.benchmark_group("simulate_errors");
    group.sample_size(10);
    group.bench_function("low,m=10,1e4", |b| b.iter(|| simulate_errors(&d, GainSource::PerTrial, 10_000, black_box(3))));
    group.finish();
}

criterion_group!(benches, joint, distance, grid, entropy, monte_carlo);
criterion_main!(benches);
