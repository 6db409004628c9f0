//! Seeded random graph generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use commscale::promisegraph::ClassifyOptions;
use commscale::{AgentId, Polarity, Promise, PromiseGraph, ScalingClass, TypeTag};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TYPES: [&str; 3] = ["t0", "t1", "t2"];
const WORDS: [&str; 3] = ["x", "y", "z"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn id(s: &str) -> AgentId {
    AgentId::new(s).unwrap()
}

pub fn tag(s: &str) -> TypeTag {
    TypeTag::new(s).unwrap()
}

pub fn agent_ids(n: usize) -> Vec<AgentId> {
    (0..n).map(|i| id(&format!("a{i}"))).collect()
}

/// Assessment `k/8`, exact in binary floating point.
pub fn dyadic(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(0..=8) as f64 / 8.0
}

fn constraint(rng: &mut ChaCha8Rng) -> Vec<&'static str> {
    WORDS.iter().copied().filter(|_| rng.random_bool(0.5)).collect()
}

/// Arbitrary graph of up to `max_agents` agents: self-promises, empty and
/// partial constraints, duplicate keys, and conditional offers all occur.
pub fn random_graph(rng: &mut ChaCha8Rng, max_agents: usize) -> PromiseGraph {
    let n = rng.random_range(1..=max_agents);
    let ids = agent_ids(n);
    let mut b = PromiseGraph::builder();
    for a in &ids {
        b.add_agent(a, dyadic(rng));
    }
    for t in TYPES {
        b.set_calibration(&tag(t), rng.random_range(1..=4) as f64);
    }
    let count = rng.random_range(0..=4 * n);
    for _ in 0..count {
        let g = ids.choose(rng).unwrap();
        let r = ids.choose(rng).unwrap();
        let t = tag(TYPES.choose(rng).unwrap());
        let mut p = if rng.random_bool(0.5) {
            Promise::offer(g, r, &t, constraint(rng))
        } else {
            Promise::accept(g, r, &t, constraint(rng))
        };
        if rng.random_bool(0.3) {
            let conds: Vec<TypeTag> = TYPES.iter().filter(|_| rng.random_bool(0.5)).map(|s| tag(s)).collect();
            p = p.given(conds);
        }
        // Matching counter-promises make bindings common.
        if rng.random_bool(0.5) {
            let mirrored = match p.polarity {
                Polarity::Offer => Promise::accept(&p.receiver, &p.giver, &p.type_tag, constraint(rng)),
                Polarity::Accept => Promise::offer(&p.receiver, &p.giver, &p.type_tag, constraint(rng)),
            };
            b.add_promise(mirrored);
        }
        b.add_promise(p);
    }
    b.build().unwrap()
}

/// Mesh of one type: each ordered pair binds with probability `rho`.
pub fn random_mesh(rng: &mut ChaCha8Rng, n: usize, rho: f64, calibration: f64, unit: bool) -> PromiseGraph {
    let t = tag("service");
    let ids = agent_ids(n);
    let mut b = PromiseGraph::builder().calibrate(&t, calibration);
    for a in &ids {
        let alpha = if unit { 1.0 } else { dyadic(rng) };
        b.add_agent(a, alpha);
    }
    for i in &ids {
        for j in &ids {
            if i != j && rng.random_bool(rho) {
                b.add_promise(Promise::offer(i, j, &t, ["x", "y"]));
                b.add_promise(Promise::accept(j, i, &t, ["y"]));
            }
        }
    }
    b.build().unwrap()
}

/// Value by direct enumeration of agent pairs and types: an unconditional
/// offer `i→j` and an acceptance `j→i` with a shared constraint word.
pub fn brute_force_value(g: &PromiseGraph) -> f64 {
    let mut total = 0.0;
    for i in g.agents() {
        for j in g.agents() {
            for (t, c) in g.calibration() {
                let offer = g.promises().iter().find(|p| {
                    p.giver == i.id
                        && p.receiver == j.id
                        && &p.type_tag == t
                        && p.polarity == Polarity::Offer
                        && p.conditions.is_empty()
                });
                let accept = g.promises().iter().find(|p| {
                    p.giver == j.id && p.receiver == i.id && &p.type_tag == t && p.polarity == Polarity::Accept
                });
                if let (Some(o), Some(a)) = (offer, accept) {
                    if o.constraint.iter().any(|w| a.constraint.contains(w)) {
                        total += c * i.assessment * j.assessment;
                    }
                }
            }
        }
    }
    total
}

/// A graph with a known dependency pattern around one output offer.
pub struct Planted {
    pub graph: PromiseGraph,
    pub output: Promise,
    pub options: ClassifyOptions,
    pub expected: ScalingClass,
}

/// Plants one of the four promise patterns, surrounded by random
/// background promises of an unrelated type among other agents.
pub fn plant(rng: &mut ChaCha8Rng, class: ScalingClass) -> Planted {
    let out = tag("output");
    let noise = tag("noise");
    let n = match class {
        ScalingClass::ScarceAgent => rng.random_range(12..=30),
        _ => rng.random_range(4..=30),
    };
    let ids = agent_ids(n);
    let giver = &ids[0];
    let mut b = PromiseGraph::builder();
    for a in &ids {
        b.add_agent(a, dyadic(rng));
    }
    for _ in 0..rng.random_range(0..=2 * n) {
        let i = &ids[rng.random_range(1..n)];
        let j = &ids[rng.random_range(1..n)];
        b.add_promise(Promise::offer(i, j, &noise, ["x"]));
        b.add_promise(Promise::accept(j, i, &noise, ["x"]));
    }
    let consumer = &ids[n - 1];
    let mut options = ClassifyOptions::default();
    let output = match class {
        ScalingClass::Interaction => {
            for j in &ids[1..] {
                b.add_promise(Promise::offer(giver, j, &out, ["x"]));
                b.add_promise(Promise::accept(j, giver, &out, ["x"]));
            }
            Promise::offer(giver, consumer, &out, ["x"])
        }
        ScalingClass::ScarceAgent => {
            b.add_promise(Promise::accept(consumer, giver, &out, ["x"]));
            Promise::offer(giver, consumer, &out, ["x"])
        }
        ScalingClass::ScarceDependency | ScalingClass::RecursiveDependency => {
            let deps = rng.random_range(1..=2);
            let mut members = BTreeSet::from([giver.clone()]);
            let mut conds = Vec::new();
            for k in 0..deps {
                let d = tag(&format!("dep{k}"));
                let provider = &ids[1 + k];
                b.add_promise(Promise::offer(provider, giver, &d, ["x"]));
                b.add_promise(Promise::accept(giver, provider, &d, ["x"]));
                members.insert(provider.clone());
                conds.push(d);
            }
            if class == ScalingClass::RecursiveDependency {
                options = options.with_group(members);
            }
            b.add_promise(Promise::accept(consumer, giver, &out, ["x"]));
            Promise::offer(giver, consumer, &out, ["x"]).given(conds)
        }
        other => panic!("no promise pattern for {other}"),
    };
    b.add_promise(output.clone());
    Planted { graph: b.build().unwrap(), output, options, expected: class }
}

pub const PLANTABLE: [ScalingClass; 4] = [
    ScalingClass::Interaction,
    ScalingClass::ScarceAgent,
    ScalingClass::ScarceDependency,
    ScalingClass::RecursiveDependency,
];
