use std::collections::{BTreeSet, HashSet};

use super::ops::find_bindings;
use super::{AgentId, GraphError, Polarity, Promise, PromiseGraph, Result, TypeTag};
use crate::meanfield::ScalingClass;

/// Default partner fraction below which an unconditional giver is scarce.
pub const DEFAULT_SCARCE_FRACTION: f64 = 0.1;

/// Tuning for [`classify_pattern`].
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyOptions {
    /// A giver bound to fewer than this fraction of the other agents is a
    /// scarce agent rather than a mesh member.
    pub scarce_fraction: f64,
    /// Member sets of known superagents.
    pub groups: Vec<BTreeSet<AgentId>>,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { scarce_fraction: DEFAULT_SCARCE_FRACTION, groups: Vec::new() }
    }
}

impl ClassifyOptions {
    pub fn with_group(mut self, members: BTreeSet<AgentId>) -> Self {
        self.groups.push(members);
        self
    }
}

/// Agents other than `giver` who offer `dependency` to `giver` with a
/// matching acceptance.
fn providers(graph: &PromiseGraph, giver: &AgentId, dependency: &TypeTag) -> BTreeSet<AgentId> {
    graph
        .promises()
        .iter()
        .filter(|o| {
            o.polarity == Polarity::Offer && &o.receiver == giver && &o.giver != giver && &o.type_tag == dependency
        })
        .filter(|o| {
            graph.promises().iter().any(|a| {
                a.polarity == Polarity::Accept
                    && &a.giver == giver
                    && a.receiver == o.giver
                    && &a.type_tag == dependency
                    && !a.constraint.is_disjoint(&o.constraint)
            })
        })
        .map(|o| o.giver.clone())
        .collect()
}

/// Identifies the dependency pattern behind an output offer.
///
/// Checked from most to least specific:
/// 1. `RecursiveDependency`: the offer is conditional, every condition has
///    a provider, and one group in `options` holds the giver and all providers.
/// 2. `ScarceDependency`: the offer is conditional and every condition has
///    a provider.
/// 3. `Interaction`: the giver holds unconditional bindings (either
///    direction, any type) with at least `scarce_fraction` of the other
///    agents, not counting its providers.
/// 4. `ScarceAgent`: everything else.
pub fn classify_pattern(graph: &PromiseGraph, output: &Promise, options: &ClassifyOptions) -> Result<ScalingClass> {
    if !graph.contains_promise(output) {
        return Err(GraphError::PromiseNotFound(output.to_string()));
    }
    if output.polarity != Polarity::Offer {
        return Err(GraphError::NotAnOffer(output.to_string()));
    }
    let giver = &output.giver;

    let mut all_providers = BTreeSet::new();
    let mut satisfied = output.is_conditional();
    for d in &output.conditions {
        let ps = providers(graph, giver, d);
        satisfied &= !ps.is_empty();
        all_providers.extend(ps);
    }
    if satisfied {
        let interior = options.groups.iter().any(|g| g.contains(giver) && all_providers.is_subset(g));
        return Ok(if interior { ScalingClass::RecursiveDependency } else { ScalingClass::ScarceDependency });
    }

    let bindings = find_bindings(graph);
    let partners: HashSet<&AgentId> = bindings
        .iter()
        .filter_map(|b| {
            if b.giver() == giver {
                Some(b.receiver())
            } else if b.receiver() == giver {
                Some(b.giver())
            } else {
                None
            }
        })
        .filter(|&a| a != giver && !all_providers.contains(a))
        .collect();
    let others = graph.len().saturating_sub(1);
    let fraction = if others == 0 { 0.0 } else { partners.len() as f64 / others as f64 };
    Ok(if others > 0 && fraction >= options.scarce_fraction {
        ScalingClass::Interaction
    } else {
        ScalingClass::ScarceAgent
    })
}
