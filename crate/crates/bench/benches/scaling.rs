use std::hint::black_box;

use commscale::ensemble::{fit_power_law, generate, generate_sequential};
use commscale::promisegraph::{find_bindings, reduce_conditionals, total_value};
use commscale::uslkit::{usl_fit, usl_speedup};
use commscale::{AgentId, EnsembleSpec, Promise, PromiseGraph, ScalingClass, ScalingParams, TypeTag, UslParams};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn params() -> ScalingParams {
    ScalingParams::new(2, 1.into()).unwrap()
}

/// Complete binding mesh where every offer is conditional on a service
/// that agent 0 provides to everyone.
fn mesh(n: usize) -> PromiseGraph {
    let (t, dep) = (TypeTag::new("work").unwrap(), TypeTag::new("power").unwrap());
    let ids: Vec<AgentId> = (0..n).map(|i| AgentId::new(format!("a{i}")).unwrap()).collect();
    let mut b = PromiseGraph::builder().calibrate(&t, 1.0).calibrate(&dep, 1.0);
    for a in &ids {
        b.add_agent(a, 1.0);
    }
    for i in &ids {
        if i != &ids[0] {
            b.add_promise(Promise::offer(&ids[0], i, &dep, ["x"]));
            b.add_promise(Promise::accept(i, &ids[0], &dep, ["x"]));
        }
        for j in &ids {
            if i != j {
                b.add_promise(Promise::offer(i, j, &t, ["x"]).given([dep.clone()]));
                b.add_promise(Promise::accept(j, i, &t, ["x"]));
            }
        }
    }
    b.build().unwrap()
}

fn ensemble(c: &mut Criterion) {
    let spec = EnsembleSpec { n_samples: 10_000, ..EnsembleSpec::new(ScalingClass::ScarceDependency, params()) };
    let mut group = c.benchmark_group("ensemble");
    group.bench_function("generate_parallel_10k", |b| b.iter(|| generate(black_box(&spec)).unwrap()));
    group.bench_function("generate_sequential_10k", |b| b.iter(|| generate_sequential(black_box(&spec)).unwrap()));
    let samples = generate(&spec).unwrap();
    group.bench_function("fit_10k", |b| b.iter(|| fit_power_law(black_box(&samples)).unwrap()));
    group.finish();
}

fn promise_graph(c: &mut Criterion) {
    let mut group = c.benchmark_group("promise_graph");
    for n in [10, 30, 60] {
        let g = mesh(n);
        group.bench_with_input(BenchmarkId::new("reduce", n), &g, |b, g| b.iter(|| reduce_conditionals(g)));
        let reduced = reduce_conditionals(&g);
        group.bench_with_input(BenchmarkId::new("find_bindings", n), &reduced, |b, g| b.iter(|| find_bindings(g)));
        group.bench_with_input(BenchmarkId::new("total_value", n), &g, |b, g| b.iter(|| total_value(g).unwrap()));
    }
    group.finish();
}

fn usl(c: &mut Criterion) {
    let truth = UslParams::new(0.03, 2e-4).unwrap();
    let data: Vec<(f64, f64)> = (1..=128).map(|n| (n as f64, usl_speedup(n as f64, &truth).unwrap())).collect();
    c.bench_function("usl_fit_128", |b| b.iter(|| usl_fit(black_box(&data)).unwrap()));
}

criterion_group!(benches, ensemble, promise_graph, usl);
criterion_main!(benches);
