//! Typed, polarized promise graphs.
//!
//! Agents make promises to one another. An offer (`+τ`) from `S` to `R`
//! and an acceptance (`−τ`) from `R` to `S` with overlapping constraints
//! form a [`Binding`], the unit of exchanged value. Offers may be
//! conditional on dependency types (`+τ | d`), which become effective once
//! the giver has the dependency supplied and accepted.
//!
//! Graphs are immutable once built; every operation returns new values.

mod classify;
mod ops;
mod text;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

pub use classify::{classify_pattern, ClassifyOptions, DEFAULT_SCARCE_FRACTION};
pub use ops::{
    adjacency, aggregate, community_members, degree, find_bindings, reduce_conditionals, reputation, total_value,
    valuation, Adjacency, ValueReport,
};
pub use text::{parse_graph, write_graph};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("invalid identifier {0:?}")]
    InvalidIdentifier(String),
    #[error("duplicate agent {0}")]
    DuplicateAgent(AgentId),
    #[error("unknown agent {0}")]
    UnknownAgent(AgentId),
    #[error("assessment of {agent} must lie in [0, 1], got {value}")]
    InvalidAssessment { agent: AgentId, value: f64 },
    #[error("calibration for type {tag} must be finite and non-negative, got {value}")]
    InvalidCalibration { tag: TypeTag, value: f64 },
    #[error("no currency calibration for promise type {0}")]
    MissingCalibration(TypeTag),
    #[error("promise not found in graph: {0}")]
    PromiseNotFound(String),
    #[error("expected an offer (+) promise, got {0}")]
    NotAnOffer(String),
    #[error("aggregation needs at least one member")]
    EmptyMembers,
    #[error("superagent id {0} collides with an existing agent")]
    IdCollision(AgentId),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, GraphError>;

fn valid_token(s: &str) -> bool {
    !s.is_empty() && s != "~" && s != "|" && !s.chars().any(|c| c.is_whitespace() || c == ',' || c == '|')
}

macro_rules! token_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(String);

        impl $name {
            /// Identifiers are non-empty and contain no whitespace, `,` or `|`.
            pub fn new(s: impl Into<String>) -> Result<Self> {
                let s = s.into();
                if valid_token(&s) {
                    Ok($name(s))
                } else {
                    Err(GraphError::InvalidIdentifier(s))
                }
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

token_type!(
    /// Opaque agent identifier, unique within a graph.
    AgentId
);
token_type!(
    /// Promise type `τ`.
    TypeTag
);

/// An agent with its impartially calibrated assessment `α ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub id: AgentId,
    pub assessment: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    /// `+`: the giver offers the service.
    Offer,
    /// `−`: the giver accepts the service.
    Accept,
}

impl Polarity {
    pub fn symbol(self) -> char {
        match self {
            Polarity::Offer => '+',
            Polarity::Accept => '-',
        }
    }
}

/// A promise `giver → receiver` with body `±type_tag` constrained to
/// `constraint`, optionally conditional on dependency types.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Promise {
    pub giver: AgentId,
    pub receiver: AgentId,
    pub type_tag: TypeTag,
    pub polarity: Polarity,
    pub constraint: BTreeSet<String>,
    /// Dependency types the giver must have supplied (`+τ | d₁,d₂`).
    pub conditions: BTreeSet<TypeTag>,
}

impl Promise {
    pub fn new<C, S>(giver: &AgentId, receiver: &AgentId, type_tag: &TypeTag, polarity: Polarity, constraint: C) -> Self
    where
        C: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Promise {
            giver: giver.clone(),
            receiver: receiver.clone(),
            type_tag: type_tag.clone(),
            polarity,
            constraint: constraint.into_iter().map(Into::into).collect(),
            conditions: BTreeSet::new(),
        }
    }

    pub fn offer<C, S>(giver: &AgentId, receiver: &AgentId, type_tag: &TypeTag, constraint: C) -> Self
    where
        C: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(giver, receiver, type_tag, Polarity::Offer, constraint)
    }

    pub fn accept<C, S>(giver: &AgentId, receiver: &AgentId, type_tag: &TypeTag, constraint: C) -> Self
    where
        C: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(giver, receiver, type_tag, Polarity::Accept, constraint)
    }

    /// Makes the promise conditional on the given dependency types.
    pub fn given<I: IntoIterator<Item = TypeTag>>(mut self, conditions: I) -> Self {
        self.conditions.extend(conditions);
        self
    }

    pub fn is_conditional(&self) -> bool {
        !self.conditions.is_empty()
    }

    /// Identity used for duplicate collapse: one link per (giver, receiver, type, polarity).
    pub fn key(&self) -> PromiseKey {
        (self.giver.clone(), self.receiver.clone(), self.type_tag.clone(), self.polarity)
    }
}

impl fmt::Display for Promise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -{}{}-> {}", self.giver, self.polarity.symbol(), self.type_tag, self.receiver)?;
        if self.is_conditional() {
            let conds: Vec<&str> = self.conditions.iter().map(TypeTag::as_str).collect();
            write!(f, " | {}", conds.join(","))?;
        }
        Ok(())
    }
}

pub type PromiseKey = (AgentId, AgentId, TypeTag, Polarity);

/// A matched offer/acceptance pair with the effective constraint `χ₊ ∩ χ₋`.
#[derive(Debug, Clone, PartialEq)]
pub struct Binding {
    pub offer: Promise,
    pub accept: Promise,
    pub effective_constraint: BTreeSet<String>,
}

impl Binding {
    /// Builds the binding if the pair satisfies the binding rule: same type,
    /// offer `S→R` against acceptance `R→S`, unconditional offer, and a
    /// non-empty constraint overlap.
    pub fn try_new(offer: &Promise, accept: &Promise) -> Option<Binding> {
        if offer.polarity != Polarity::Offer
            || accept.polarity != Polarity::Accept
            || offer.is_conditional()
            || offer.type_tag != accept.type_tag
            || offer.giver != accept.receiver
            || offer.receiver != accept.giver
        {
            return None;
        }
        let effective: BTreeSet<String> = offer.constraint.intersection(&accept.constraint).cloned().collect();
        if effective.is_empty() {
            return None;
        }
        Some(Binding { offer: offer.clone(), accept: accept.clone(), effective_constraint: effective })
    }

    pub fn giver(&self) -> &AgentId {
        &self.offer.giver
    }

    pub fn receiver(&self) -> &AgentId {
        &self.offer.receiver
    }

    pub fn type_tag(&self) -> &TypeTag {
        &self.offer.type_tag
    }
}

/// Agents, promises and per-type currency calibration `c_S`.
#[derive(Debug, Clone, PartialEq)]
pub struct PromiseGraph {
    agents: Vec<Agent>,
    index: HashMap<AgentId, usize>,
    promises: Vec<Promise>,
    calibration: BTreeMap<TypeTag, f64>,
}

impl PromiseGraph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::default()
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn promises(&self) -> &[Promise] {
        &self.promises
    }

    pub fn calibration(&self) -> &BTreeMap<TypeTag, f64> {
        &self.calibration
    }

    pub fn agent(&self, id: &AgentId) -> Option<&Agent> {
        self.index.get(id).map(|&i| &self.agents[i])
    }

    pub fn agent_index(&self, id: &AgentId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn contains_agent(&self, id: &AgentId) -> bool {
        self.index.contains_key(id)
    }

    pub fn contains_promise(&self, p: &Promise) -> bool {
        self.promises.iter().any(|q| q == p)
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub(crate) fn require_agent(&self, id: &AgentId) -> Result<&Agent> {
        self.agent(id).ok_or_else(|| GraphError::UnknownAgent(id.clone()))
    }

    /// Copy of this graph as a builder, for derived graphs.
    pub fn to_builder(&self) -> GraphBuilder {
        GraphBuilder {
            agents: self.agents.clone(),
            promises: self.promises.clone(),
            calibration: self.calibration.clone(),
        }
    }
}

/// Collects agents, promises and calibrations, then validates them.
#[derive(Debug, Clone, Default)]
pub struct GraphBuilder {
    agents: Vec<Agent>,
    promises: Vec<Promise>,
    calibration: BTreeMap<TypeTag, f64>,
}

impl GraphBuilder {
    pub fn agent(mut self, id: &AgentId, assessment: f64) -> Self {
        self.add_agent(id, assessment);
        self
    }

    pub fn add_agent(&mut self, id: &AgentId, assessment: f64) {
        self.agents.push(Agent { id: id.clone(), assessment });
    }

    pub fn promise(mut self, p: Promise) -> Self {
        self.add_promise(p);
        self
    }

    pub fn add_promise(&mut self, p: Promise) {
        self.promises.push(p);
    }

    pub fn calibrate(mut self, tag: &TypeTag, value: f64) -> Self {
        self.set_calibration(tag, value);
        self
    }

    pub fn set_calibration(&mut self, tag: &TypeTag, value: f64) {
        self.calibration.insert(tag.clone(), value);
    }

    /// Validates the graph. Later duplicates of a (giver, receiver, type,
    /// polarity) key are dropped; the first occurrence wins.
    pub fn build(self) -> Result<PromiseGraph> {
        let mut index = HashMap::with_capacity(self.agents.len());
        for (i, a) in self.agents.iter().enumerate() {
            if !(0.0..=1.0).contains(&a.assessment) {
                return Err(GraphError::InvalidAssessment { agent: a.id.clone(), value: a.assessment });
            }
            if index.insert(a.id.clone(), i).is_some() {
                return Err(GraphError::DuplicateAgent(a.id.clone()));
            }
        }
        for (tag, &value) in &self.calibration {
            if !(value.is_finite() && value >= 0.0) {
                return Err(GraphError::InvalidCalibration { tag: tag.clone(), value });
            }
        }
        let mut seen = std::collections::HashSet::new();
        let mut promises = Vec::with_capacity(self.promises.len());
        for p in self.promises {
            for id in [&p.giver, &p.receiver] {
                if !index.contains_key(id) {
                    return Err(GraphError::UnknownAgent(id.clone()));
                }
            }
            if seen.insert(p.key()) {
                promises.push(p);
            }
        }
        Ok(PromiseGraph { agents: self.agents, index, promises, calibration: self.calibration })
    }
}
