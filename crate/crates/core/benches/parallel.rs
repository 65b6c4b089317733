use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lmg_core::bethe::{solve_all, SolverOptions};
use lmg_core::circuit::{build_circuit, AngleSet, DepthMode};
use lmg_core::model::{make_params, sector_configs};
use lmg_core::sim::{run, StateVector};
use lmg_core::vqe::{optimize, VqeOptions};
use lmg_core::Exec;

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn spectrum_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_all");
    group.sample_size(10);
    for n in [12usize, 24] {
        let p = make_params(n, 0.75, 0.5).unwrap();
        for (name, exec) in POLICIES {
            let opts = SolverOptions { exec, ..Default::default() };
            group.bench_with_input(BenchmarkId::new(name, n), &p, |b, p| b.iter(|| solve_all(p, &opts).unwrap()));
        }
    }
    group.finish();
}

fn vqe_restarts(c: &mut Criterion) {
    let mut group = c.benchmark_group("vqe_restarts");
    group.sample_size(10);
    let p = make_params(10, 0.75, 0.5).unwrap();
    let sector = sector_configs(10)[0];
    for (name, exec) in POLICIES {
        let opts = VqeOptions { restarts: 8, seed: 3, max_evals: 2000, exec, ..Default::default() };
        group.bench_function(name, |b| b.iter(|| optimize(&sector, &p, &opts).unwrap()));
    }
    group.finish();
}

fn dense_simulation(c: &mut Criterion) {
    let mut group = c.benchmark_group("dense_simulation");
    group.sample_size(10);
    for qubits in [16usize, 20] {
        let set = AngleSet::new((0..qubits - 1).map(|i| 0.3 + 0.1 * i as f64).collect(), DepthMode::Log).unwrap();
        let circ = build_circuit(&set);
        let input = StateVector::zero(qubits).unwrap().to_dense().unwrap();
        for (name, exec) in POLICIES {
            group.bench_with_input(BenchmarkId::new(name, qubits), &input, |b, input| {
                b.iter(|| run(&circ, Some(input), exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, spectrum_sweep, vqe_restarts, dense_simulation);
criterion_main!(benches);
