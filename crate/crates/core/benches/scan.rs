use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use odvp::freeboundary::{scan, sweep_parameter, Functional, Knob, Problem, SolveOptions};
use odvp::model::ProblemSpec;
use odvp::parallel::Execution;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn bench_scan(c: &mut Criterion) {
    let spec = ProblemSpec::unit_ball_constant(0.005);
    let mut group = c.benchmark_group("scan_phi_512");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| scan(black_box(&spec), Functional::Phi, 1.0, 5.0, 512, exec).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("scan_f_256");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| scan(black_box(&spec), Functional::F, 1.0, 3.0, 256, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let spec = ProblemSpec::unit_ball_constant(0.005);
    let values: Vec<f64> = (1..=32).map(|i| 0.0002 * i as f64).collect();
    let mut group = c.benchmark_group("sweep_b_32");
    group.sample_size(20);
    for (name, exec) in MODES {
        let options = SolveOptions {
            execution: exec,
            ..Default::default()
        };
        group.bench_with_input(
            BenchmarkId::from_parameter(name),
            &options,
            |b, &options| {
                b.iter(|| {
                    sweep_parameter(
                        black_box(&spec),
                        Problem::B,
                        Knob::GConstant,
                        &values,
                        options,
                    )
                })
            },
        );
    }
    group.finish();
}

criterion_group!(benches, bench_scan, bench_sweep);
criterion_main!(benches);
