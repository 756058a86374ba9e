use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spcluster::ansatz_residual::{residual_bound_check, MultiPeakAnsatz, ResidualKernel};
use spcluster::reduced_energy::{geometric_list, ReducedModel};
use spcluster::{
    solve_ground_state, Execution, InteractionConstants, Nonlinearity, PeakConfiguration, PolytopeKind,
    ReductionParameters, SolverOptions,
};

fn modes() -> [(&'static str, Execution); 2] {
    [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)]
}

fn bench(c: &mut Criterion) {
    let profile = solve_ground_state(Nonlinearity::power(3.0).unwrap(), 3, &SolverOptions::default()).unwrap();
    let constants = InteractionConstants::compute(&profile).unwrap();
    let params = ReductionParameters::for_nonlinearity(&profile.nonlinearity());
    let model = ReducedModel::new(&profile, &constants, params);
    let kernel = ResidualKernel::new(&profile);

    let polygon = PeakConfiguration::polygon(12, 3).unwrap();
    let eps = geometric_list(1e-3, 1e-9, 25).unwrap();
    let mut group = c.benchmark_group("sweep polygon(12), 25 ε");
    for (name, exec) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| model.sweep(&polygon, &eps, exec).unwrap())
        });
    }
    group.finish();

    let dodeca = PeakConfiguration::polytope(PolytopeKind::Dodecahedron, 3, 3).unwrap();
    let e = 1e-4;
    let r = model.maximize_m(&dodeca, e).unwrap().argmax;
    let ansatz = MultiPeakAnsatz::new(&dodeca, &kernel, r, e).unwrap();
    let mut group = c.benchmark_group("residual dodecahedron");
    group.sample_size(20);
    for (name, exec) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| residual_bound_check(&ansatz, &params, exec))
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
