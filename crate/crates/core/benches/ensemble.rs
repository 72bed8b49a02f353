//! Sequential against rayon-parallel ensembles and analytic sweeps.
//!
//! With the `parallel` feature off both arms run sequentially, which is a
//! quick way to check the fallback costs nothing extra.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use bistab::analytics::analytic_sweep;
use bistab::dsl::state_from_str;
use bistab::dynamics::{run_ensemble_from, OscillatorParams, SimConfig};
use bistab::numerics::linspace;
use bistab::states::{x_marginal, InitialDistribution, Representation};
use bistab::Execution;

const ARMS: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn ensemble(c: &mut Criterion) {
    let state = state_from_str("fock(1)", 32).unwrap();
    let init = InitialDistribution::from_state(&state, Representation::Husimi).unwrap();
    let params = OscillatorParams::opo(2.0, 0.1, 0.2);
    let mut group = c.benchmark_group("ensemble");
    group.sample_size(10);
    for n_traj in [256usize, 2048] {
        let sim = SimConfig { n_traj, settle: true, ..SimConfig::default_for(params.lambda) };
        group.throughput(Throughput::Elements(n_traj as u64));
        for (name, exec) in ARMS {
            group.bench_with_input(BenchmarkId::new(name, n_traj), &sim, |b, sim| {
                b.iter(|| run_ensemble_from(&init, &params, sim, exec).unwrap().p)
            });
        }
    }
    group.finish();
}

// trajectories run to t_max, so per-step cost dominates
fn ensemble_full_length(c: &mut Criterion) {
    let state = state_from_str("fock(0)", 16).unwrap();
    let init = InitialDistribution::from_state(&state, Representation::Husimi).unwrap();
    let params = OscillatorParams::opo(1.5, 0.05, 0.0);
    let sim = SimConfig { n_traj: 512, ..SimConfig::default_for(params.lambda) };
    let mut group = c.benchmark_group("ensemble_full_length");
    group.sample_size(10);
    group.throughput(Throughput::Elements((sim.n_traj * sim.n_steps()) as u64));
    for (name, exec) in ARMS {
        group.bench_function(name, |b| b.iter(|| run_ensemble_from(&init, &params, &sim, exec).unwrap().p));
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let state = state_from_str("coh(1) + coh(-1)", 32).unwrap();
    let m = x_marginal(&state, Representation::Husimi).unwrap();
    let bs = linspace(-3.0, 3.0, 41);
    let mut group = c.benchmark_group("analytic_sweep");
    for lambda in [1.2, 2.0] {
        group.bench_with_input(BenchmarkId::from_parameter(lambda), &lambda, |b, &l| {
            b.iter(|| analytic_sweep(&m, l, Representation::Husimi, &bs).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, ensemble, ensemble_full_length, sweep);
criterion_main!(benches);
