//! Deterministic, initialized, edge-labeled transition systems.

use std::collections::{BTreeSet, HashMap};

/// An edge `source -event-> target`, by index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub source: usize,
    pub event: usize,
    pub target: usize,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.source == self.target
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TsError {
    #[error("transition system has no states")]
    EmptyStateSet,
    #[error("state `{state}` has two `{event}` edges (to `{first}` and `{second}`)")]
    NondeterministicEdge {
        state: String,
        event: String,
        first: String,
        second: String,
    },
    #[error("states unreachable from the initial state: {}", .0.join(", "))]
    UnreachableState(Vec<String>),
    #[error("events without edges: {}", .0.join(", "))]
    UnusedEvent(Vec<String>),
    #[error("invalid identifier `{0}`")]
    InvalidIdentifier(String),
}

/// Whether `name` is a legal state or event identifier.
pub fn is_valid_identifier(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || "_.'-⊤⊥".contains(c))
}

/// Collects raw states, events and edges and validates them into a
/// [`TransitionSystem`].
#[derive(Debug, Clone, Default)]
pub struct TsBuilder {
    initial: Option<String>,
    states: Vec<String>,
    events: Vec<String>,
    edges: Vec<(String, String, String)>,
}

impl TsBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn initial(&mut self, state: impl Into<String>) -> &mut Self {
        self.initial = Some(state.into());
        self
    }

    /// Declares a state that need not occur on any edge.
    pub fn state(&mut self, state: impl Into<String>) -> &mut Self {
        self.states.push(state.into());
        self
    }

    /// Declares an event. Events without edges are rejected by [`TsBuilder::build`].
    pub fn event(&mut self, event: impl Into<String>) -> &mut Self {
        self.events.push(event.into());
        self
    }

    pub fn edge(
        &mut self,
        source: impl Into<String>,
        event: impl Into<String>,
        target: impl Into<String>,
    ) -> &mut Self {
        self.edges.push((source.into(), event.into(), target.into()));
        self
    }

    pub fn build(&self) -> Result<TransitionSystem, TsError> {
        let initial = self.initial.as_ref().ok_or(TsError::EmptyStateSet)?;

        let mut state_set: BTreeSet<&str> = BTreeSet::new();
        let mut event_set: BTreeSet<&str> = BTreeSet::new();
        state_set.insert(initial);
        state_set.extend(self.states.iter().map(String::as_str));
        event_set.extend(self.events.iter().map(String::as_str));
        for (s, e, t) in &self.edges {
            state_set.insert(s);
            state_set.insert(t);
            event_set.insert(e);
        }
        for name in state_set.iter().chain(event_set.iter()) {
            if !is_valid_identifier(name) {
                return Err(TsError::InvalidIdentifier(name.to_string()));
            }
        }

        let states: Vec<String> = state_set.iter().map(|s| s.to_string()).collect();
        let events: Vec<String> = event_set.iter().map(|s| s.to_string()).collect();
        let state_ids: HashMap<String, usize> = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let event_ids: HashMap<String, usize> = events.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();

        let edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|(s, e, t)| Edge {
                source: state_ids[s],
                event: event_ids[e],
                target: state_ids[t],
            })
            .collect();
        TransitionSystem::from_indexed(states, events, state_ids[initial.as_str()], edges)
    }
}

/// Validates an edge list with an initial state.
pub fn validate_ts<S: AsRef<str>>(initial: &str, edges: &[(S, S, S)]) -> Result<TransitionSystem, TsError> {
    let mut b = TsBuilder::new();
    b.initial(initial);
    for (s, e, t) in edges {
        b.edge(s.as_ref(), e.as_ref(), t.as_ref());
    }
    b.build()
}

/// Lists of edge indices per key, stored contiguously.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Adjacency {
    offsets: Vec<usize>,
    items: Vec<usize>,
}

impl Adjacency {
    /// Groups `(key, item)` pairs by key, keeping their order within a key.
    fn new(keys: usize, pairs: impl Iterator<Item = (usize, usize)> + Clone) -> Self {
        let mut offsets = vec![0; keys + 1];
        for (key, _) in pairs.clone() {
            offsets[key + 1] += 1;
        }
        for i in 0..keys {
            offsets[i + 1] += offsets[i];
        }
        let mut items = vec![0; offsets[keys]];
        for (key, item) in pairs {
            items[offsets[key]] = item;
            offsets[key] += 1;
        }
        // Each start has advanced to the next one; shift back.
        offsets.copy_within(0..keys, 1);
        offsets[0] = 0;
        Adjacency { offsets, items }
    }

    fn get(&self, key: usize) -> &[usize] {
        &self.items[self.offsets[key]..self.offsets[key + 1]]
    }
}

/// A validated transition system. States and events are indexed in
/// lexicographic order of their identifiers; edges are sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionSystem {
    states: Vec<String>,
    events: Vec<String>,
    edges: Vec<Edge>,
    initial: usize,
    out_edges: Adjacency,
    incident: Adjacency,
    by_event: Adjacency,
    loop_free: bool,
    bi_directed: bool,
}

impl TransitionSystem {
    /// Builds from sorted, valid, distinct names and edges by index.
    pub(crate) fn from_indexed(
        states: Vec<String>,
        events: Vec<String>,
        initial: usize,
        mut edges: Vec<Edge>,
    ) -> Result<Self, TsError> {
        edges.sort();
        edges.dedup();
        for pair in edges.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if a.source == b.source && a.event == b.event {
                return Err(TsError::NondeterministicEdge {
                    state: states[a.source].clone(),
                    event: events[a.event].clone(),
                    first: states[a.target].clone(),
                    second: states[b.target].clone(),
                });
            }
        }

        TransitionSystem::assemble(states, events, edges, initial)
    }

    fn assemble(states: Vec<String>, events: Vec<String>, edges: Vec<Edge>, initial: usize) -> Result<Self, TsError> {
        let n = states.len();
        let out_edges = Adjacency::new(n, edges.iter().enumerate().map(|(k, e)| (e.source, k)));
        let incident = Adjacency::new(
            n,
            edges.iter().enumerate().flat_map(|(k, e)| {
                let back = (!e.is_loop()).then_some((e.target, k));
                std::iter::once((e.source, k)).chain(back)
            }),
        );
        let by_event = Adjacency::new(events.len(), edges.iter().enumerate().map(|(k, e)| (e.event, k)));

        let unused: Vec<String> = (0..events.len())
            .filter(|&e| by_event.get(e).is_empty())
            .map(|e| events[e].clone())
            .collect();
        if !unused.is_empty() {
            return Err(TsError::UnusedEvent(unused));
        }

        let mut seen = vec![false; n];
        let mut stack = vec![initial];
        seen[initial] = true;
        while let Some(s) = stack.pop() {
            for &k in out_edges.get(s) {
                let t = edges[k].target;
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        let unreachable: Vec<String> = (0..n).filter(|&s| !seen[s]).map(|s| states[s].clone()).collect();
        if !unreachable.is_empty() {
            return Err(TsError::UnreachableState(unreachable));
        }

        let loop_free = edges.iter().all(|e| !e.is_loop());
        let bi_directed = loop_free
            && edges.iter().all(|e| {
                edges
                    .binary_search(&Edge {
                        source: e.target,
                        event: e.event,
                        target: e.source,
                    })
                    .is_ok()
            });

        Ok(TransitionSystem {
            states,
            events,
            edges,
            initial,
            out_edges,
            incident,
            by_event,
            loop_free,
            bi_directed,
        })
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_events(&self) -> usize {
        self.events.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn events(&self) -> &[String] {
        &self.events
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.states[s]
    }

    pub fn event_name(&self, e: usize) -> &str {
        &self.events[e]
    }

    pub fn state_id(&self, name: &str) -> Option<usize> {
        self.states.binary_search_by(|s| s.as_str().cmp(name)).ok()
    }

    pub fn event_id(&self, name: &str) -> Option<usize> {
        self.events.binary_search_by(|e| e.as_str().cmp(name)).ok()
    }

    /// Indices of edges leaving `s`, ordered by event.
    pub fn out_edges(&self, s: usize) -> &[usize] {
        self.out_edges.get(s)
    }

    /// Indices of edges with `s` as source or target (self-loops once).
    pub fn incident_edges(&self, s: usize) -> &[usize] {
        self.incident.get(s)
    }

    /// Indices of edges labeled `e`.
    pub fn event_edges(&self, e: usize) -> &[usize] {
        self.by_event.get(e)
    }

    pub fn successor(&self, s: usize, e: usize) -> Option<usize> {
        self.out_edges
            .get(s)
            .iter()
            .map(|&k| self.edges[k])
            .find(|edge| edge.event == e)
            .map(|edge| edge.target)
    }

    pub fn is_loop_free(&self) -> bool {
        self.loop_free
    }

    pub fn is_bi_directed(&self) -> bool {
        self.bi_directed
    }

    /// Follows `events` from `start`, returning the traversed edge indices.
    pub fn walk(&self, start: usize, events: &[&str]) -> Option<Vec<usize>> {
        let mut at = start;
        let mut path = Vec::with_capacity(events.len());
        for name in events {
            let e = self.event_id(name)?;
            let k = *self.out_edges.get(at).iter().find(|&&k| self.edges[k].event == e)?;
            path.push(k);
            at = self.edges[k].target;
        }
        Some(path)
    }

    /// Edges as name triples, in sorted order.
    pub fn edge_names(&self) -> impl Iterator<Item = (&str, &str, &str)> {
        self.edges.iter().map(|e| {
            (
                self.states[e.source].as_str(),
                self.events[e.event].as_str(),
                self.states[e.target].as_str(),
            )
        })
    }

    /// A builder pre-filled with this system, for constructing variants.
    pub fn to_builder(&self) -> TsBuilder {
        let mut b = TsBuilder::new();
        b.initial(self.state_name(self.initial));
        for s in &self.states {
            b.state(s.clone());
        }
        for (s, e, t) in self.edge_names() {
            b.edge(s, e, t);
        }
        b
    }
}
