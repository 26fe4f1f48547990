use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dqg::exec::Execution;
use dqg::filtering::ConstantControl;
use dqg::games::{circle_game, evaluate_policy_mc, McConfig};
use dqg::pde::{field, mild_solve, GridFunction, ManifoldGrid, MildConfig};
use dqg::quantum::ProjectiveState;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn monte_carlo(c: &mut Criterion) {
    let spec = circle_game(1.0, 0.0, 1.0).unwrap();
    let policy = ConstantControl { u: 0.5, v: 0.0 };
    let w0 = ProjectiveState::new(vec![dqg::Complex64::new(1.0, 0.0)]).unwrap();
    let mut group = c.benchmark_group("policy_mc_2000_paths");
    group.sample_size(10);
    for (name, exec) in MODES {
        let cfg = McConfig { exec, ..McConfig::new(1e-2, 2000, 1) };
        group.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| black_box(evaluate_policy_mc(&spec, &policy, &w0, cfg).unwrap().mean))
        });
    }
    group.finish();
}

fn hjb_sweep(c: &mut Criterion) {
    let grid = ManifoldGrid::sphere(24, 2.0).unwrap();
    let terminal = GridFunction::from_fn(&grid, |x| x[0].cos()).unwrap();
    let h = field(|x: [f64; 2], p: [f64; 2]| x[0].sin() * x[1].cos() + 0.5 * p[0].abs(), 0.5);
    let mut group = c.benchmark_group("sphere_mild_lmax24");
    group.sample_size(10);
    for (name, exec) in MODES {
        let cfg = MildConfig { exec, dt: 1e-2, ..MildConfig::default() };
        group.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| black_box(mild_solve(&grid, &terminal, &h, 0.5, cfg).unwrap().iterations()))
        });
    }
    group.finish();
}

criterion_group!(benches, monte_carlo, hjb_sweep);
criterion_main!(benches);
