//! Rayon against the single-threaded path on the two data-parallel hot spots.
//! Without the `parallel` feature both variants run sequentially.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pbe_core::analysis::{error_table_with, TableSpec};
use pbe_core::par::Exec;
use pbe_core::polyexp::{integer, rational};
use pbe_core::refsolver::{integrate_with, GridSpec};
use pbe_core::{iterate_ahpetm, CoagKernel, ExactSolution, FragSpec, PolyExp1D, ProblemSpec};

const MODES: [(&str, Exec); 2] = [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)];

fn l1_table(c: &mut Criterion) {
    let problem = ProblemSpec::coag(CoagKernel::Constant, PolyExp1D::exponential(integer(1))).unwrap();
    let series = iterate_ahpetm::<1>(&problem, 6).unwrap();
    let spec = TableSpec::L1 { orders: vec![3, 4, 5, 6], times: vec![0.5, 1.0, 1.5, 2.0], xmax: 50.0, step: 1e-2 };
    let mut group = c.benchmark_group("l1_error_table");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| error_table_with(exec, &series, &ExactSolution::ConstKernelExp, black_box(&spec)).unwrap())
        });
    }
    group.finish();
}

fn reference_solver(c: &mut Criterion) {
    let frag = FragSpec::binary(rational(1, 2));
    let problem = ProblemSpec::ccfe(CoagKernel::Constant, frag, PolyExp1D::mono(integer(4), 1, integer(2))).unwrap();
    let spec = GridSpec::new(50.0, 2000, 1e-3, 0.05).unwrap();
    let mut group = c.benchmark_group("reference_integrate");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| integrate_with(exec, &problem, black_box(spec)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, l1_table, reference_solver);
criterion_main!(benches);
