//! Rayon against the calling thread on the three heaviest batch loops.
//! Build with `--no-default-features` to measure the sequential fallback alone.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use isorearr::flow::{flow_trace, DualKind, FlowConfig};
use isorearr::infconv::{inf_convolution_with, CostSpec};
use isorearr::transforms::legendre_grid_with;
use isorearr::{random_grid_nd, random_profile, Execution, Grid, RandomConvexSpec};

const MODES: [(&str, Execution); 2] = [
    ("parallel", Execution::Parallel),
    ("sequential", Execution::Sequential),
];

fn inf_convolution(c: &mut Criterion) {
    let g = Grid::centered_cube(2, 3.0, 41).unwrap();
    let f = random_grid_nd(&RandomConvexSpec::new(3).with_asymmetry(1.0), &g).unwrap();
    let cost = CostSpec::distance();
    let mut group = c.benchmark_group("inf_convolution_2d");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| inf_convolution_with(e, black_box(&f), &cost, &g).unwrap())
        });
    }
    group.finish();
}

fn legendre(c: &mut Criterion) {
    let g = Grid::centered_cube(2, 3.0, 61).unwrap();
    let f = random_grid_nd(&RandomConvexSpec::new(5).with_curvature(0.5), &g).unwrap();
    let out = Grid::centered_cube(2, 2.0, 61).unwrap();
    let mut group = c.benchmark_group("legendre_2d");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| legendre_grid_with(e, black_box(&f), &out).unwrap())
        });
    }
    group.finish();
}

fn flow(c: &mut Criterion) {
    let psi = random_profile(&RandomConvexSpec::new(7)).unwrap();
    let times = [0.0, 0.1, 0.3, 1.0, 3.0];
    let cfg = FlowConfig {
        residuals: false,
        ..FlowConfig::default()
    };
    let mut group = c.benchmark_group("flow_trace_n2");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| flow_trace(black_box(&psi), 2, &times, DualKind::Legendre, &cfg, e).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, inf_convolution, legendre, flow);
criterion_main!(benches);
