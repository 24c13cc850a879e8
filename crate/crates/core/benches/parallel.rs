use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qcmark_core::fixtures::by_name;
use qcmark_core::metrics::{phase_sweep, BackendConfig, PhaseSweep};
use qcmark_core::par::Exec;
use qcmark_core::qaoa::{optimize_params, Graph};
use qcmark_core::simulate::{sample, NoiseModel};
use qcmark_core::transpile::CouplingMap;
use qcmark_core::watermark::{embed_combined, RandomSpec};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn noisy_sampling(c: &mut Criterion) {
    let f = by_name("4gt5").expect("bundled fixture");
    let (marked, _) = embed_combined(&f.circuit(), &f.default_rotation(), &RandomSpec::drawn(2, 7)).expect("embeds");
    let noise = NoiseModel::toy();
    let mut group = c.benchmark_group("sample_toy_4000");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| sample(&marked, 0b01011, 4000, 1, Some(&noise), exec).expect("samples"))
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let f = by_name("4gt5").expect("bundled fixture");
    let host = f.circuit();
    let sweep = PhaseSweep {
        ancillas: f.ancillas.to_vec(),
        target: Some(f.rotation_target),
        cnot: Some(f.rotation_cnot),
        grid_steps: 12,
        input: 0,
        shots: 500,
        seed: 3,
    };
    let configs = [
        BackendConfig::new("line5-toy", CouplingMap::preset("line5"), Some(NoiseModel::toy())),
        BackendConfig::new("ring7-toy", CouplingMap::preset("ring7"), Some(NoiseModel::toy())),
    ];
    let mut group = c.benchmark_group("phase_sweep_12x2");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| phase_sweep(&host, &sweep, &configs, exec).expect("sweeps"))
        });
    }
    group.finish();
}

fn qaoa_grid(c: &mut Criterion) {
    let g = Graph::preset("wheel5").expect("preset");
    let mut group = c.benchmark_group("qaoa_optimize_wheel5_p2");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| optimize_params(&g, 2, 400, 5, exec).expect("optimizes"))
        });
    }
    group.finish();
}

criterion_group!(benches, noisy_sampling, sweep, qaoa_grid);
criterion_main!(benches);
