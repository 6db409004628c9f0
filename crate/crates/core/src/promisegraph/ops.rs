use std::collections::{BTreeSet, HashMap, HashSet};

use petgraph::unionfind::UnionFind;

use super::{AgentId, Binding, GraphError, Polarity, Promise, PromiseGraph, Result, TypeTag};

/// Dense 0/1 adjacency over the graph's agents, in graph order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    agents: Vec<AgentId>,
    cells: Vec<u8>,
}

impl Adjacency {
    pub fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    pub fn size(&self) -> usize {
        self.agents.len()
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.cells[i * self.agents.len() + j]
    }

    /// Total number of links, `Σ_ij Π_ij`.
    pub fn link_count(&self) -> usize {
        self.cells.iter().map(|&c| c as usize).sum()
    }

    /// Links excluding the diagonal.
    pub fn off_diagonal_count(&self) -> usize {
        let n = self.agents.len();
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| i != j && self.get(i, j) == 1).count()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> {
        self.cells.chunks(self.agents.len().max(1))
    }
}

/// `Π^{(τ)}_{ij} = 1` iff some promise of type `τ` runs from agent `i` to agent `j`.
pub fn adjacency(graph: &PromiseGraph, type_tag: &TypeTag) -> Adjacency {
    let n = graph.len();
    let mut cells = vec![0u8; n * n];
    for p in graph.promises().iter().filter(|p| &p.type_tag == type_tag) {
        let i = graph.agent_index(&p.giver).expect("validated endpoint");
        let j = graph.agent_index(&p.receiver).expect("validated endpoint");
        cells[i * n + j] = 1;
    }
    Adjacency { agents: graph.agents().iter().map(|a| a.id.clone()).collect(), cells }
}

/// Number of distinct `(receiver, type)` pairs the agent promises to.
pub fn degree(graph: &PromiseGraph, agent: &AgentId) -> Result<usize> {
    graph.require_agent(agent)?;
    let links: HashSet<(&AgentId, &TypeTag)> = graph
        .promises()
        .iter()
        .filter(|p| &p.giver == agent)
        .map(|p| (&p.receiver, &p.type_tag))
        .collect();
    Ok(links.len())
}

/// Every binding of an unconditional offer with its matching acceptance,
/// sorted by giver, receiver and type.
pub fn find_bindings(graph: &PromiseGraph) -> Vec<Binding> {
    let accepts: HashMap<(&AgentId, &AgentId, &TypeTag), &Promise> = graph
        .promises()
        .iter()
        .filter(|p| p.polarity == Polarity::Accept)
        .map(|p| ((&p.giver, &p.receiver, &p.type_tag), p))
        .collect();
    let mut out: Vec<Binding> = graph
        .promises()
        .iter()
        .filter(|p| p.polarity == Polarity::Offer && !p.is_conditional())
        .filter_map(|offer| {
            let accept = accepts.get(&(&offer.receiver, &offer.giver, &offer.type_tag))?;
            Binding::try_new(offer, accept)
        })
        .collect();
    out.sort_by(|a, b| {
        (a.giver(), a.receiver(), a.type_tag()).cmp(&(b.giver(), b.receiver(), b.type_tag()))
    });
    out
}

/// Applies the assisted promise law until nothing changes: a conditional
/// offer `A →(+S | d)→ B` becomes `A →(+S)→ B` once, for every condition
/// `d`, some `K` offers `+d` to `A` unconditionally and `A` accepts `−d`
/// from `K` with overlapping constraints. Unsatisfied conditionals stay.
pub fn reduce_conditionals(graph: &PromiseGraph) -> PromiseGraph {
    let mut promises = graph.promises().to_vec();
    loop {
        let supplied = supplied_dependencies(&promises);
        let mut changed = false;
        for p in promises.iter_mut().filter(|p| p.polarity == Polarity::Offer && p.is_conditional()) {
            if p.conditions.iter().all(|d| supplied.contains(&(p.giver.clone(), d.clone()))) {
                p.conditions.clear();
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut builder = graph.to_builder();
    builder.promises = promises;
    builder.build().expect("reduction preserves validity")
}

/// `(agent, type)` pairs for which `agent` holds a binding as the acceptor.
fn supplied_dependencies(promises: &[Promise]) -> HashSet<(AgentId, TypeTag)> {
    let accepts: HashMap<(&AgentId, &AgentId, &TypeTag), &Promise> = promises
        .iter()
        .filter(|p| p.polarity == Polarity::Accept)
        .map(|p| ((&p.giver, &p.receiver, &p.type_tag), p))
        .collect();
    promises
        .iter()
        .filter(|p| p.polarity == Polarity::Offer && !p.is_conditional())
        .filter(|o| {
            accepts
                .get(&(&o.receiver, &o.giver, &o.type_tag))
                .is_some_and(|a| Binding::try_new(o, a).is_some())
        })
        .map(|o| (o.receiver.clone(), o.type_tag.clone()))
        .collect()
}

/// Value of a one-way transfer: `c_S · α_giver · α_receiver`.
pub fn valuation(graph: &PromiseGraph, binding: &Binding) -> Result<f64> {
    let giver = graph.require_agent(binding.giver())?;
    let receiver = graph.require_agent(binding.receiver())?;
    let c = graph
        .calibration()
        .get(binding.type_tag())
        .ok_or_else(|| GraphError::MissingCalibration(binding.type_tag().clone()))?;
    Ok(c * giver.assessment * receiver.assessment)
}

/// Network value summary.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ValueReport {
    /// `Σ v_C` over all bindings after conditional reduction.
    pub total: f64,
    pub bindings: usize,
    /// Fraction of ordered pairs of distinct agents joined by at least one
    /// binding, so several types or self-bindings never push it past 1.
    pub density: f64,
    /// Agents with at least one binding (`N_I`).
    pub active_agents: usize,
    /// Largest set of agents connected through bindings.
    pub largest_component: usize,
}

/// Metcalfe-style network value: sum of [`valuation`] over every binding of
/// the reduced graph. Fails only if a bound type has no calibration.
pub fn total_value(graph: &PromiseGraph) -> Result<ValueReport> {
    let reduced = reduce_conditionals(graph);
    let bindings = find_bindings(&reduced);
    let mut total = 0.0;
    for b in &bindings {
        total += valuation(&reduced, b)?;
    }
    let n = reduced.len();
    let mut components = UnionFind::<usize>::new(n);
    let mut active = vec![false; n];
    let mut linked = HashSet::new();
    for b in &bindings {
        let i = reduced.agent_index(b.giver()).expect("bound agent");
        let j = reduced.agent_index(b.receiver()).expect("bound agent");
        active[i] = true;
        active[j] = true;
        components.union(i, j);
        if i != j {
            linked.insert((i, j));
        }
    }
    let mut sizes: HashMap<usize, usize> = HashMap::new();
    for i in (0..n).filter(|&i| active[i]) {
        *sizes.entry(components.find(i)).or_default() += 1;
    }
    let pairs = n.saturating_mul(n.saturating_sub(1));
    Ok(ValueReport {
        total,
        bindings: bindings.len(),
        density: if pairs == 0 { 0.0 } else { linked.len() as f64 / pairs as f64 },
        active_agents: active.iter().filter(|&&a| a).count(),
        largest_component: sizes.values().copied().max().unwrap_or(0),
    })
}

/// Number of distinct agents promising to accept (`−b`) something from `agent`.
pub fn reputation(graph: &PromiseGraph, agent: &AgentId) -> Result<usize> {
    graph.require_agent(agent)?;
    let acceptors: HashSet<&AgentId> = graph
        .promises()
        .iter()
        .filter(|p| p.polarity == Polarity::Accept && &p.receiver == agent)
        .map(|p| &p.giver)
        .collect();
    Ok(acceptors.len())
}

/// Agents `A` bound to `authority` by a membership offer `A →(+τ)→ authority`
/// that the authority accepts.
pub fn community_members(
    graph: &PromiseGraph,
    authority: &AgentId,
    membership_type: &TypeTag,
) -> Result<BTreeSet<AgentId>> {
    graph.require_agent(authority)?;
    Ok(find_bindings(graph)
        .into_iter()
        .filter(|b| b.receiver() == authority && b.type_tag() == membership_type)
        .map(|b| b.giver().clone())
        .collect())
}

/// Interior providers of `member`'s dependency `d`, smallest id first.
fn interior_providers<'g>(
    graph: &'g PromiseGraph,
    members: &BTreeSet<AgentId>,
    member: &AgentId,
    dependency: &TypeTag,
) -> Vec<&'g Promise> {
    let mut offers: Vec<&Promise> = graph
        .promises()
        .iter()
        .filter(|o| {
            o.polarity == Polarity::Offer
                && &o.receiver == member
                && &o.type_tag == dependency
                && members.contains(&o.giver)
                && graph.promises().iter().any(|a| {
                    a.polarity == Polarity::Accept
                        && &a.giver == member
                        && a.receiver == o.giver
                        && &a.type_tag == dependency
                        && !o.constraint.is_disjoint(&a.constraint)
                })
        })
        .collect();
    offers.sort_by(|a, b| a.giver.cmp(&b.giver));
    offers
}

/// Follows interior dependencies of an exterior offer. Returns the members
/// on the chain and the dependency types still owed by the outside world.
fn interior_chain(
    graph: &PromiseGraph,
    members: &BTreeSet<AgentId>,
    offer: &Promise,
) -> (BTreeSet<AgentId>, BTreeSet<TypeTag>) {
    let mut chain = BTreeSet::new();
    let mut exterior = BTreeSet::new();
    let mut visited: HashSet<(AgentId, TypeTag)> = HashSet::new();
    let mut stack: Vec<(AgentId, TypeTag)> =
        offer.conditions.iter().map(|d| (offer.giver.clone(), d.clone())).collect();
    while let Some((agent, dep)) = stack.pop() {
        if !visited.insert((agent.clone(), dep.clone())) {
            continue;
        }
        match interior_providers(graph, members, &agent, &dep).first() {
            Some(provider) => {
                chain.insert(agent);
                chain.insert(provider.giver.clone());
                stack.extend(provider.conditions.iter().map(|d| (provider.giver.clone(), d.clone())));
            }
            None => {
                exterior.insert(dep);
            }
        }
    }
    (chain, exterior)
}

/// Replaces `members` by a single superagent `super_id`.
///
/// Interior promises disappear. Promises crossing the boundary are
/// re-attached to the superagent and collapse to one link per
/// (counterparty, type, polarity). Conditions of exterior offers that are
/// met inside the superagent are hidden; conditions met outside remain.
///
/// The superagent's assessment is the product of the assessments of every
/// member on an interior dependency chain feeding an exterior offer
/// (promise keeping along a chain is conjunctive). With no such chain it is
/// the mean member assessment.
pub fn aggregate(graph: &PromiseGraph, members: &BTreeSet<AgentId>, super_id: &AgentId) -> Result<PromiseGraph> {
    if members.is_empty() {
        return Err(GraphError::EmptyMembers);
    }
    for m in members {
        graph.require_agent(m)?;
    }
    if graph.contains_agent(super_id) {
        return Err(GraphError::IdCollision(super_id.clone()));
    }

    let mut chained: BTreeSet<AgentId> = BTreeSet::new();
    let mut promises = Vec::new();
    for p in graph.promises() {
        let from_inside = members.contains(&p.giver);
        let to_inside = members.contains(&p.receiver);
        match (from_inside, to_inside) {
            (true, true) | (false, false) => {
                if !from_inside {
                    promises.push(p.clone());
                }
            }
            (true, false) => {
                let mut q = p.clone();
                q.giver = super_id.clone();
                if p.polarity == Polarity::Offer && p.is_conditional() {
                    let (chain, exterior) = interior_chain(graph, members, p);
                    chained.extend(chain);
                    q.conditions = exterior;
                }
                promises.push(q);
            }
            (false, true) => {
                let mut q = p.clone();
                q.receiver = super_id.clone();
                promises.push(q);
            }
        }
    }

    let assessment = if chained.is_empty() {
        let sum: f64 = members.iter().map(|m| graph.agent(m).expect("checked").assessment).sum();
        sum / members.len() as f64
    } else {
        chained.iter().map(|m| graph.agent(m).expect("member").assessment).product()
    };

    let mut builder = PromiseGraph::builder();
    for a in graph.agents().iter().filter(|a| !members.contains(&a.id)) {
        builder.add_agent(&a.id, a.assessment);
    }
    builder.add_agent(super_id, assessment);
    for p in promises {
        builder.add_promise(p);
    }
    for (tag, &c) in graph.calibration() {
        builder.set_calibration(tag, c);
    }
    builder.build()
}
