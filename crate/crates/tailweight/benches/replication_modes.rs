//! Throughput of the simulation harness: the rayon data-parallel path on a
//! full pool against single-threaded execution of the same plans. Built
//! without the `parallel` feature, the same benchmarks time the sequential
//! fallback.

use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};
use tailweight::montecarlo::{run_table, run_zn_study, ModelSpec, SimulationPlan, ZnStudyPlan};

fn table_plan() -> SimulationPlan {
    SimulationPlan {
        model: ModelSpec::hall(0.6065306597126334, 1.0, 2.0),
        gammas: vec![0.5, 2.0],
        rhos: vec![0.0, 1.0],
        ps: vec![1.0, 2.0],
        n: 1000,
        k_n: 136,
        replications: 200,
        master_seed: 99,
    }
}

fn zn_plan() -> ZnStudyPlan {
    ZnStudyPlan {
        model: ModelSpec::frechet(),
        gamma: 1.0,
        rho: 1.0,
        p: 1.0,
        n: 900,
        k_n: 10,
        replications: 1000,
        master_seed: 99,
        chi2_bins: 20,
        hist_bins: 30,
    }
}

fn bench_table(c: &mut Criterion) {
    let plan = table_plan();
    let mut group = c.benchmark_group("table");
    #[cfg(feature = "parallel")]
    {
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .expect("pool builds");
        group.bench_function("single_thread", |b| {
            b.iter(|| single.install(|| run_table(&plan).unwrap()))
        });
        group.bench_function("parallel", |b| b.iter(|| run_table(&plan).unwrap()));
    }
    #[cfg(not(feature = "parallel"))]
    group.bench_function("sequential_fallback", |b| {
        b.iter(|| run_table(&plan).unwrap())
    });
    group.finish();
}

fn bench_zn_study(c: &mut Criterion) {
    let plan = zn_plan();
    let mut group = c.benchmark_group("zn_study");
    #[cfg(feature = "parallel")]
    {
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .expect("pool builds");
        group.bench_function("single_thread", |b| {
            b.iter(|| single.install(|| run_zn_study(&plan).unwrap()))
        });
        group.bench_function("parallel", |b| b.iter(|| run_zn_study(&plan).unwrap()));
    }
    #[cfg(not(feature = "parallel"))]
    group.bench_function("sequential_fallback", |b| {
        b.iter(|| run_zn_study(&plan).unwrap())
    });
    group.finish();
}

criterion_group! {
    name = modes;
    config = Criterion::default()
        .sample_size(10)
        .warm_up_time(Duration::from_millis(500))
        .measurement_time(Duration::from_secs(3));
    targets = bench_table, bench_zn_study
}
criterion_main!(modes);
