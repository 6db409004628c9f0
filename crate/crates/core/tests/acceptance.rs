//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the summary always prints.

mod common;

use std::collections::{BTreeSet, HashMap};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use commscale::ensemble::{compare_value, fit_power_law, generate, DEFAULT_K};
use commscale::meanfield::{predicted_exponent, to_f64};
use commscale::observed::observed;
use commscale::promisegraph::{
    adjacency, aggregate, classify_pattern, find_bindings, reduce_conditionals, total_value,
};
use commscale::uslkit::{effective_exponent, response_time, serial_time, usl_fit, usl_speedup};
use commscale::{
    EnsembleSpec, Exponent, Polarity, PromiseGraph, QueueParams, ScalingClass, ScalingParams, SerialModel, UslParams,
};
use num_rational::Ratio;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::Rng;

use common::{brute_force_value, plant, random_graph, random_mesh, rng, tag, PLANTABLE, TYPES};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn params_2_1() -> ScalingParams {
    ScalingParams::new(2, Ratio::from_integer(1)).unwrap()
}

fn table() -> [(ScalingClass, Exponent); 7] {
    let r = Ratio::new;
    [
        (ScalingClass::InfrastructureVolume, r(5, 6)),
        (ScalingClass::LinearConsumption, r(1, 1)),
        (ScalingClass::Interaction, r(7, 6)),
        (ScalingClass::ScarceAgent, r(1, 6)),
        (ScalingClass::ScarceDependency, r(4, 3)),
        (ScalingClass::RecursiveDependency, r(13, 12)),
        (ScalingClass::VirtualInteraction, r(1, 2)),
    ]
}

fn exponent_table() -> Outcome {
    let start = Instant::now();
    let params = params_2_1();
    for (class, expected) in table() {
        let got = predicted_exponent(class, &params, true).map_err(|e| e.to_string())?;
        check(got == expected, format!("{class}: got {got}, expected {expected}"))?;
        let diff = (to_f64(got) - to_f64(expected)).abs();
        check(diff <= 1e-12, format!("{class}: float diff {diff}"))?;
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!("7 classes exact at D=2, H=1 in {elapsed:?}"))
}

fn ensemble_recovery() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (class, expected) in table() {
        let spec = EnsembleSpec::new(class, params_2_1());
        check(
            spec.n_samples == 500 && spec.n_min == 1e3 && spec.n_max == 1e7 && spec.noise_sigma == 0.1 && spec.seed == 42,
            "default spec drifted from 500 samples on [1e3, 1e7], sigma 0.1, seed 42",
        )?;
        let fit = fit_power_law(&generate(&spec).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let gap = (fit.beta - to_f64(expected)).abs();
        worst = worst.max(gap);
        check(gap <= 0.02, format!("{class}: beta {} vs {expected}", fit.beta))?;
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(5), format!("took {elapsed:?}"))?;
    Ok(format!("max |beta - theory| = {worst:.4} over 7 classes in {elapsed:?}"))
}

fn concordance() -> Outcome {
    let params = params_2_1();
    let mut parts = Vec::new();
    for (key, stated) in [("wages", 0.047), ("private_rd_employment", 0.007), ("patents_uk_all", 0.037)] {
        let o = observed(key).ok_or(format!("missing observed value {key}"))?;
        let class = o.class.ok_or(format!("{key} has no class"))?;
        let c = compare_value(o.beta, o.uncertainty, class, &params, DEFAULT_K).map_err(|e| e.to_string())?;
        check((c.gap - stated).abs() <= 5e-4, format!("{key}: gap {} vs {stated}", c.gap))?;
        parts.push(format!("{key} {:.3}", c.gap));
    }
    Ok(parts.join(", "))
}

fn metcalfe() -> Outcome {
    for n in 1..=50usize {
        let c = 3.0;
        let g = random_mesh(&mut rng(0), n, 1.0, c, true);
        let v = total_value(&g).map_err(|e| e.to_string())?.total;
        check(v == c * (n * (n - 1)) as f64, format!("complete mesh N={n}: {v}"))?;
    }
    let mut meshes = 0;
    for n in 2..=50usize {
        for (k, rho) in [0.1, 0.3, 0.5, 0.9].into_iter().enumerate() {
            let mut r = rng((n * 10 + k) as u64);
            let c = r.random_range(1..=5) as f64;
            let g = random_mesh(&mut r, n, rho, c, false);
            let v = total_value(&g).map_err(|e| e.to_string())?.total;
            let brute = brute_force_value(&g);
            check(v == brute, format!("rho-mesh N={n} rho={rho}: {v} vs brute force {brute}"))?;
            meshes += 1;
        }
    }
    Ok(format!("complete meshes N=1..50 exact, {meshes} random rho-meshes equal brute force"))
}

fn usl_properties() -> Outcome {
    let mut r = rng(5);
    for _ in 0..100 {
        let p = UslParams::new(r.random_range(-0.5..1.0), r.random_range(0.0..0.1)).unwrap();
        let s1 = usl_speedup(1.0, &p).map_err(|e| e.to_string())?;
        check(s1 == 1.0, format!("S(1) = {s1} for {p:?}"))?;
    }

    let mut runner = TestRunner::new_with_rng(
        Config { cases: 1000, failure_persistence: None, ..Config::default() },
        proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha),
    );
    runner
        .run(&(0.0..1.0f64, 0.0..0.1f64, 1.0..1e4f64), |(a, b, n)| {
            let s = usl_speedup(n, &UslParams::new(a, b).unwrap()).unwrap();
            prop_assert!(s <= n * (1.0 + 1e-12), "S({}) = {} with ({}, {})", n, s, a, b);
            Ok(())
        })
        .map_err(|e| e.to_string())?;

    let truth = UslParams::new(0.03, 2e-4).unwrap();
    let data: Vec<(f64, f64)> = (1..=64).map(|n| (n as f64, usl_speedup(n as f64, &truth).unwrap())).collect();
    let fit = usl_fit(&data).map_err(|e| e.to_string())?;
    let err = (fit.params.contention() - 0.03).abs().max((fit.params.coherency() - 2e-4).abs());
    check(err <= 1e-6, format!("round-trip error {err}"))?;

    let superlinear: Vec<(f64, f64)> = (1..=32).map(|n| (n as f64, (n as f64).powf(1.1))).collect();
    let fit = usl_fit(&superlinear).map_err(|e| e.to_string())?;
    check(fit.params.contention() < 0.0, format!("superlinear contention {}", fit.params.contention()))?;
    Ok(format!(
        "S(1)=1 x100, S<=N x1000, round-trip err {err:.1e}, superlinear contention {:.4}",
        fit.params.contention()
    ))
}

fn serial_regimes() -> Outcome {
    let gamma = 2.0;
    let m = SerialModel::new(1.0, 1e4, 0.0).unwrap();
    let n = 1e6;
    let ratio = serial_time(gamma * n, &m).unwrap() / serial_time(n, &m).unwrap();
    let delta = effective_exponent(n, &m).unwrap();
    let diff = (ratio - gamma.powf(-delta)).abs();
    check(diff < 0.01, format!("parallel regime diff {diff}"))?;

    let m = SerialModel::new(1.0, 1.0, 0.1).unwrap();
    let n = 1e4;
    let ratio2 = serial_time(gamma * n, &m).unwrap() / serial_time(n, &m).unwrap();
    check((ratio2 / 2.0 - 1.0).abs() < 0.01, format!("coherence regime ratio {ratio2}"))?;
    Ok(format!("parallel regime diff {diff:.2e}, coherence regime ratio {ratio2:.4}"))
}

fn count_conditionals(g: &PromiseGraph) -> usize {
    g.promises().iter().filter(|p| p.is_conditional()).count()
}

fn graph_laws() -> Outcome {
    const CASES: u64 = 256;
    for seed in 0..CASES {
        let g = random_graph(&mut rng(seed), 30);
        let once = reduce_conditionals(&g);
        check(reduce_conditionals(&once) == once, format!("seed {seed}: reduce not idempotent"))?;
        check(count_conditionals(&once) <= count_conditionals(&g), format!("seed {seed}: conditionals grew"))?;
        check(once.promises().len() == g.promises().len(), format!("seed {seed}: promise count changed"))?;
    }

    for seed in 0..CASES {
        let g = random_graph(&mut rng(1000 + seed), 30);
        let bindings = find_bindings(&g);
        let mut used = BTreeSet::new();
        for b in &bindings {
            let inter: BTreeSet<String> = b.offer.constraint.intersection(&b.accept.constraint).cloned().collect();
            check(
                !inter.is_empty() && inter == b.effective_constraint,
                format!("seed {seed}: effective constraint is not the intersection"),
            )?;
            check(used.insert(b.offer.key()) && used.insert(b.accept.key()), format!("seed {seed}: promise reused"))?;
        }
        let expected = g
            .promises()
            .iter()
            .filter(|o| o.polarity == Polarity::Offer && !o.is_conditional())
            .filter(|o| {
                g.promises().iter().any(|a| {
                    a.polarity == Polarity::Accept
                        && a.giver == o.receiver
                        && a.receiver == o.giver
                        && a.type_tag == o.type_tag
                        && !a.constraint.is_disjoint(&o.constraint)
                })
            })
            .count();
        check(bindings.len() == expected, format!("seed {seed}: {} bindings, expected {expected}", bindings.len()))?;
    }

    for seed in 0..CASES {
        let mut r = rng(2000 + seed);
        let g = random_graph(&mut r, 30);
        let ids: Vec<_> = g.agents().iter().map(|a| a.id.clone()).collect();
        let members: BTreeSet<_> = ids.iter().filter(|_| r.random_bool(0.3)).cloned().collect();
        if members.is_empty() {
            continue;
        }
        let agg = aggregate(&g, &members, &common::id("super")).map_err(|e| e.to_string())?;
        let pos = |g: &PromiseGraph| -> HashMap<_, _> {
            g.agents().iter().enumerate().map(|(i, a)| (a.id.clone(), i)).collect()
        };
        let (before_pos, after_pos) = (pos(&g), pos(&agg));
        for t in TYPES {
            let (before, after) = (adjacency(&g, &tag(t)), adjacency(&agg, &tag(t)));
            for i in ids.iter().filter(|a| !members.contains(*a)) {
                for j in ids.iter().filter(|a| !members.contains(*a)) {
                    check(
                        before.get(before_pos[i], before_pos[j]) == after.get(after_pos[i], after_pos[j]),
                        format!("seed {seed}: exterior link {i}->{j} of {t} changed"),
                    )?;
                }
            }
        }
    }

    let params = params_2_1();
    let expected: HashMap<_, _> = table().into_iter().collect();
    for seed in 0..CASES {
        let class = PLANTABLE[(seed % 4) as usize];
        let planted = plant(&mut rng(3000 + seed), class);
        let got = classify_pattern(&planted.graph, &planted.output, &planted.options).map_err(|e| e.to_string())?;
        check(got == planted.expected, format!("seed {seed}: planted {class}, classified {got}"))?;
        let beta = predicted_exponent(got, &params, true).map_err(|e| e.to_string())?;
        check(beta == expected[&class], format!("seed {seed}: {class} exponent {beta}"))?;
    }
    Ok(format!("{CASES} seeded graphs per law (N <= 30): idempotence, intersection, exterior conservation, classify"))
}

fn queue_stability() -> Outcome {
    let mut r = rng(8);
    for _ in 0..100 {
        let mu = r.random_range(0.0..10.0);
        let lambda = mu + r.random_range(0.0..10.0);
        check(response_time(&QueueParams { lambda, mu }).is_err(), format!("lambda {lambda} >= mu {mu} accepted"))?;
    }
    for _ in 0..100 {
        let mu = r.random_range(0.1..10.0);
        let lambda = r.random_range(0.0..mu);
        let t = response_time(&QueueParams { lambda, mu }).map_err(|e| e.to_string())?;
        let want = 1.0 / (mu - lambda);
        check((t - want).abs() <= 1e-12 * want.max(1.0), format!("{t} vs {want}"))?;
    }
    Ok("100 unstable draws rejected, 100 stable draws equal 1/(mu - lambda)".to_string())
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("exponent table reproduction", exponent_table),
        ("ensemble exponent recovery", ensemble_recovery),
        ("observed-data concordance", concordance),
        ("network value oracle", metcalfe),
        ("USL properties", usl_properties),
        ("serial time regimes", serial_regimes),
        ("promise-graph laws", graph_laws),
        ("queue stability", queue_stability),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
