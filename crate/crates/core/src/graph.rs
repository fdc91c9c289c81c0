//! Append-only causal event graph.
//!
//! Every value event points at a `base` (an individual initiation event, a
//! parent value event, or a schema event). The latest value event for a
//! `(base, property)` slot is its head; earlier events stay queryable as
//! history. Timestamps are stored but never consulted.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::event::{Event, EventDraft, EventId, Value};

/// Event type of an individual initiation event.
pub const INDIVIDUAL_KIND: &str = "Individual";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("unknown cause {0}")]
    UnknownCause(EventId),
    #[error("unknown base {0}")]
    UnknownBase(EventId),
    #[error("unknown model event {0}")]
    UnknownModel(EventId),
    #[error("unknown individual `{0}`")]
    UnknownIndividual(String),
    #[error("unknown event {0}")]
    UnknownEvent(EventId),
    #[error("{from} is not a direct cause of {to}")]
    NotAPath { from: EventId, to: EventId },
    #[error("corrupt graph document: {0}")]
    CorruptDocument(String),
    #[error("event {event} names cause {cause} that does not precede it")]
    DanglingCause { event: EventId, cause: EventId },
}

/// A compacted chain: `intent` now directly explains `result`.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub intent: EventId,
    pub result: EventId,
    pub archived: Vec<EventId>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CausalTrace {
    pub root: EventId,
    /// `(effect, cause)` links in breadth-first discovery order.
    pub edges: Vec<(EventId, EventId)>,
    /// Events reached, root first.
    pub nodes: Vec<EventId>,
    /// Largest hop count reached.
    pub depth: usize,
}

impl CausalTrace {
    pub fn causes_of(&self, id: EventId) -> impl Iterator<Item = EventId> + '_ {
        self.edges
            .iter()
            .filter(move |(effect, _)| *effect == id)
            .map(|(_, cause)| *cause)
    }
}

fn zero_clock() -> u64 {
    0
}

#[derive(Clone)]
pub struct Graph {
    events: Vec<Event>,
    positions: BTreeMap<EventId, usize>,
    /// `(base, type)` → positions of events, in append order.
    slots: BTreeMap<EventId, BTreeMap<String, Vec<usize>>>,
    /// base → positions of every event naming it as base.
    children: BTreeMap<EventId, Vec<usize>>,
    individuals: BTreeMap<String, EventId>,
    individual_order: Vec<EventId>,
    archived: BTreeSet<EventId>,
    summaries: Vec<Summary>,
    rng: ChaCha8Rng,
    clock: fn() -> u64,
}

impl core::fmt::Debug for Graph {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Graph")
            .field("events", &self.events.len())
            .field("individuals", &self.individual_order.len())
            .field("archived", &self.archived.len())
            .finish()
    }
}

impl Default for Graph {
    fn default() -> Self {
        Graph::new(0)
    }
}

impl Graph {
    /// An empty graph whose ids are drawn from a generator seeded with `seed`.
    pub fn new(seed: u64) -> Self {
        Graph {
            events: Vec::new(),
            positions: BTreeMap::new(),
            slots: BTreeMap::new(),
            children: BTreeMap::new(),
            individuals: BTreeMap::new(),
            individual_order: Vec::new(),
            archived: BTreeSet::new(),
            summaries: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            clock: zero_clock,
        }
    }

    /// Sets the timestamp source. The default clock always returns 0.
    pub fn with_clock(mut self, clock: fn() -> u64) -> Self {
        self.clock = clock;
        self
    }

    pub fn set_clock(&mut self, clock: fn() -> u64) {
        self.clock = clock;
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// All events in append order, archived ones included.
    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn get(&self, id: EventId) -> Option<&Event> {
        self.positions.get(&id).map(|&p| &self.events[p])
    }

    pub fn contains(&self, id: EventId) -> bool {
        self.positions.contains_key(&id)
    }

    pub fn position(&self, id: EventId) -> Option<usize> {
        self.positions.get(&id).copied()
    }

    pub fn last(&self) -> Option<&Event> {
        self.events.last()
    }

    fn fresh_id(&mut self) -> EventId {
        loop {
            let hi = u128::from(self.rng.next_u64());
            let lo = u128::from(self.rng.next_u64());
            let id = EventId(hi << 64 | lo);
            if id.0 != 0 && !self.positions.contains_key(&id) {
                return id;
            }
        }
    }

    fn check(&self, draft: &EventDraft) -> Result<(), GraphError> {
        if let Some(base) = draft.base {
            if !self.contains(base) {
                return Err(GraphError::UnknownBase(base));
            }
        }
        if let Some(model) = draft.model {
            if !self.contains(model) {
                return Err(GraphError::UnknownModel(model));
            }
        }
        if let Some(cause) = draft.cause.iter().find(|c| !self.contains(**c)) {
            return Err(GraphError::UnknownCause(*cause));
        }
        match draft.value {
            Value::Ref(target) | Value::Retract(target) if !self.contains(target) => {
                Err(GraphError::UnknownEvent(target))
            }
            _ => Ok(()),
        }
    }

    /// Appends a new event with a fresh id.
    pub fn append(&mut self, draft: EventDraft) -> Result<EventId, GraphError> {
        self.check(&draft)?;
        let id = self.fresh_id();
        let timestamp = (self.clock)();
        self.push(Event {
            id,
            base: draft.base,
            kind: draft.kind,
            value: draft.value,
            actor: draft.actor,
            cause: draft.cause,
            model: draft.model,
            timestamp,
        });
        Ok(id)
    }

    fn push(&mut self, event: Event) {
        let pos = self.events.len();
        self.positions.insert(event.id, pos);
        if let Some(base) = event.base {
            self.slots
                .entry(base)
                .or_default()
                .entry(event.kind.clone())
                .or_default()
                .push(pos);
            self.children.entry(base).or_default().push(pos);
        }
        if event.kind == INDIVIDUAL_KIND {
            if let Value::Text(name) = &event.value {
                self.individuals.insert(name.clone(), event.id);
                self.individual_order.push(event.id);
            }
        }
        self.events.push(event);
    }

    /// Initiation event of the named individual.
    pub fn individual(&self, name: &str) -> Option<EventId> {
        self.individuals.get(name).copied()
    }

    pub fn require_individual(&self, name: &str) -> Result<EventId, GraphError> {
        self.individual(name)
            .ok_or_else(|| GraphError::UnknownIndividual(String::from(name)))
    }

    /// Name carried by an individual initiation event.
    pub fn individual_name(&self, id: EventId) -> Option<&str> {
        match self.get(id) {
            Some(Event {
                kind,
                value: Value::Text(name),
                ..
            }) if kind == INDIVIDUAL_KIND => Some(name),
            _ => None,
        }
    }

    /// Individual initiation events in creation order.
    pub fn individuals(&self) -> impl Iterator<Item = &Event> + '_ {
        self.individual_order.iter().filter_map(|id| self.get(*id))
    }

    /// Events with `base`, in append order.
    pub fn children(&self, base: EventId) -> impl Iterator<Item = &Event> + '_ {
        self.children
            .get(&base)
            .into_iter()
            .flatten()
            .map(|&p| &self.events[p])
    }

    fn slot(&self, base: EventId, property: &str) -> &[usize] {
        self.slots
            .get(&base)
            .and_then(|m| m.get(property))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Every event of the slot in append order, tombstones included.
    pub fn slot_history(&self, base: EventId, property: &str) -> Vec<&Event> {
        self.slot(base, property)
            .iter()
            .map(|&p| &self.events[p])
            .collect()
    }

    /// Latest live value event of the slot.
    pub fn head(&self, base: EventId, property: &str) -> Option<&Event> {
        let mut retracted = BTreeSet::new();
        for &p in self.slot(base, property).iter().rev() {
            let event = &self.events[p];
            match event.value {
                Value::Retract(target) => {
                    retracted.insert(target);
                }
                _ if retracted.contains(&event.id) => {}
                _ => return Some(event),
            }
        }
        None
    }

    /// Live value events of a multi-valued slot, in append order.
    pub fn values(&self, base: EventId, property: &str) -> Vec<&Event> {
        let slot = self.slot(base, property);
        let retracted: BTreeSet<EventId> = slot
            .iter()
            .filter_map(|&p| match self.events[p].value {
                Value::Retract(target) => Some(target),
                _ => None,
            })
            .collect();
        slot.iter()
            .map(|&p| &self.events[p])
            .filter(|e| !matches!(e.value, Value::Retract(_)) && !retracted.contains(&e.id))
            .collect()
    }

    pub fn value_of(&self, base: EventId, property: &str) -> Value {
        self.head(base, property)
            .map(|e| e.value.clone())
            .unwrap_or(Value::Null)
    }

    pub fn current_value(&self, individual: &str, property: &str) -> Result<Value, GraphError> {
        let id = self.require_individual(individual)?;
        Ok(self.value_of(id, property))
    }

    pub fn history(&self, individual: &str, property: &str) -> Result<Vec<&Event>, GraphError> {
        let id = self.require_individual(individual)?;
        Ok(self.slot_history(id, property))
    }

    pub fn is_archived(&self, id: EventId) -> bool {
        self.archived.contains(&id)
    }

    pub fn summaries(&self) -> &[Summary] {
        &self.summaries
    }

    /// Causes of `id` as seen through compacted regions: archived causes are
    /// replaced by their own causes, and a summary adds its intent.
    pub fn effective_causes(&self, id: EventId) -> Vec<EventId> {
        let Some(event) = self.get(id) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        let mut stack: Vec<EventId> = event.cause.iter().rev().copied().collect();
        let mut seen = BTreeSet::new();
        while let Some(c) = stack.pop() {
            if !seen.insert(c) {
                continue;
            }
            if self.is_archived(c) {
                if let Some(archived) = self.get(c) {
                    stack.extend(archived.cause.iter().rev().copied());
                }
            } else if !out.contains(&c) {
                out.push(c);
            }
        }
        for s in self.summaries.iter().filter(|s| s.result == id) {
            if !out.contains(&s.intent) {
                out.push(s.intent);
            }
        }
        out
    }

    /// Breadth-first walk over cause links, at most `max_depth` hops.
    pub fn causal_trace(&self, id: EventId, max_depth: usize) -> Result<CausalTrace, GraphError> {
        if !self.contains(id) {
            return Err(GraphError::UnknownEvent(id));
        }
        let mut trace = CausalTrace {
            root: id,
            nodes: alloc::vec![id],
            ..CausalTrace::default()
        };
        let mut seen = BTreeSet::from([id]);
        let mut queue = VecDeque::from([(id, 0usize)]);
        while let Some((current, depth)) = queue.pop_front() {
            if depth >= max_depth {
                continue;
            }
            for cause in self.effective_causes(current) {
                trace.edges.push((current, cause));
                trace.depth = trace.depth.max(depth + 1);
                if seen.insert(cause) {
                    trace.nodes.push(cause);
                    queue.push_back((cause, depth + 1));
                }
            }
        }
        Ok(trace)
    }

    fn references(event: &Event) -> impl Iterator<Item = EventId> + '_ {
        let value_ref = match event.value {
            Value::Ref(t) | Value::Retract(t) => Some(t),
            _ => None,
        };
        event
            .cause
            .iter()
            .copied()
            .chain(event.base)
            .chain(event.model)
            .chain(value_ref)
    }

    /// Events of `roots`, and with `closure` everything they reference
    /// (causes, bases, models, referenced values), in append order.
    pub fn export_subgraph(&self, roots: &[EventId], closure: bool) -> Result<Vec<Event>, GraphError> {
        let mut keep = BTreeSet::new();
        let mut stack = Vec::new();
        for &root in roots {
            if !self.contains(root) {
                return Err(GraphError::UnknownEvent(root));
            }
            if keep.insert(root) {
                stack.push(root);
            }
        }
        if closure {
            while let Some(id) = stack.pop() {
                let event = self.get(id).expect("kept ids exist");
                for r in Self::references(event) {
                    if keep.insert(r) {
                        stack.push(r);
                    }
                }
            }
        }
        let mut positions: Vec<usize> = keep.iter().map(|id| self.positions[id]).collect();
        positions.sort_unstable();
        Ok(positions.into_iter().map(|p| self.events[p].clone()).collect())
    }

    /// Rebuilds a graph from an exported document, assigning fresh ids.
    /// Returns the new graph and the old → new id mapping.
    pub fn import(document: &[Event], seed: u64) -> Result<(Graph, BTreeMap<EventId, EventId>), GraphError> {
        let mut graph = Graph::new(seed);
        let mut remap: BTreeMap<EventId, EventId> = BTreeMap::new();
        let mut declared = BTreeSet::new();
        for event in document {
            if !declared.insert(event.id) {
                return Err(GraphError::CorruptDocument(alloc::format!(
                    "duplicate id {}",
                    event.id
                )));
            }
        }
        for event in document {
            let map = |id: EventId, what: &str| -> Result<EventId, GraphError> {
                remap.get(&id).copied().ok_or_else(|| {
                    GraphError::CorruptDocument(alloc::format!(
                        "{what} {id} of {} is not earlier in the document",
                        event.id
                    ))
                })
            };
            let mut cause = Vec::with_capacity(event.cause.len());
            for &c in &event.cause {
                match remap.get(&c) {
                    Some(&n) => cause.push(n),
                    None => {
                        return Err(GraphError::DanglingCause {
                            event: event.id,
                            cause: c,
                        })
                    }
                }
            }
            let base = event.base.map(|b| map(b, "base")).transpose()?;
            let model = event.model.map(|m| map(m, "model")).transpose()?;
            let value = match &event.value {
                Value::Ref(t) => Value::Ref(map(*t, "referenced event")?),
                Value::Retract(t) => Value::Retract(map(*t, "retracted event")?),
                other => other.clone(),
            };
            let id = graph.fresh_id();
            graph.push(Event {
                id,
                base,
                kind: event.kind.clone(),
                value,
                actor: event.actor.clone(),
                cause,
                model,
                timestamp: event.timestamp,
            });
            remap.insert(event.id, id);
        }
        Ok((graph, remap))
    }

    /// A new graph holding exactly the events appended up to and including
    /// `at`, with their original ids.
    pub fn branch(&self, at: EventId) -> Result<Graph, GraphError> {
        let end = self.position(at).ok_or(GraphError::UnknownEvent(at))?;
        let mut rng = self.rng.clone();
        rng.set_stream(self.rng.get_stream().wrapping_add(1 + self.events.len() as u64));
        let mut graph = Graph {
            rng,
            clock: self.clock,
            ..Graph::new(0)
        };
        for event in &self.events[..=end] {
            graph.push(event.clone());
        }
        graph.archived = self
            .archived
            .iter()
            .filter(|id| graph.contains(**id))
            .copied()
            .collect();
        graph.summaries = self
            .summaries
            .iter()
            .filter(|s| graph.contains(s.result))
            .cloned()
            .collect();
        Ok(graph)
    }

    /// Compacts a causal chain: every interior event is archived and the
    /// first event becomes a direct cause of the last. Heads are untouched,
    /// so current values do not change.
    pub fn transitive_reduce(&self, chain: &[EventId]) -> Result<Graph, GraphError> {
        for &id in chain {
            if !self.contains(id) {
                return Err(GraphError::UnknownEvent(id));
            }
        }
        for pair in chain.windows(2) {
            let later = self.get(pair[1]).expect("checked");
            if !later.cause.contains(&pair[0]) {
                return Err(GraphError::NotAPath {
                    from: pair[0],
                    to: pair[1],
                });
            }
        }
        let mut graph = self.clone();
        if chain.len() < 2 {
            return Ok(graph);
        }
        let interior: Vec<EventId> = chain[1..chain.len() - 1].to_vec();
        graph.archived.extend(interior.iter().copied());
        graph.summaries.push(Summary {
            intent: chain[0],
            result: chain[chain.len() - 1],
            archived: interior,
        });
        Ok(graph)
    }
}
