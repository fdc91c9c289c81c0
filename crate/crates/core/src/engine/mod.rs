//! Dataflow core. An appended value event is dispatched to the restrictions
//! subscribed to its property; each recomputation may append further events,
//! which are dispatched in turn until nothing changes.

mod eval;
mod index;

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::bsl::{parse_document, BslError, DataType, Document, Literal, PropertyKind};
use crate::event::{Event, EventDraft, EventId, Value};
use crate::graph::{Graph, GraphError};
use crate::models::{
    materialize, read_schema, AnalysisReport, ModelProperty, ModelSpec,
    Registration, Registry, SchemaIds, ANY_INDIVIDUAL,
};
use crate::scenarios::VIEW_GENESIS;

pub use eval::{evaluate, truthy, EvalContext, EvalError};
pub use index::{Subscription, SubscriptionIndex};

/// Actor recorded on every event the engine derives.
pub const ENGINE_ACTOR: &str = "engine";

/// Evaluations allowed per cascade.
pub const EVALUATION_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error("parse error: {0}")]
    Parse(#[from] BslError),
    #[error("registration failed:\n{0}")]
    Analysis(AnalysisReport),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("unknown individual `{0}`")]
    UnknownIndividual(String),
    #[error("`{individual}` has no property `{property}`")]
    UnknownProperty { individual: String, property: String },
    #[error("`{property}` is not an action of `{individual}`")]
    UnknownAction { individual: String, property: String },
    #[error("action `{property}` of `{individual}` is not available")]
    ActionUnavailable { individual: String, property: String },
    #[error("`{property}` is derived by SetValue and cannot be set")]
    NotEditable { property: String },
    #[error("invalid value for `{property}`: {detail}")]
    InvalidValue { property: String, detail: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CascadeStatus {
    Quiescent,
    DepthExceeded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AvailabilityChange {
    pub individual: EventId,
    pub property: String,
    pub available: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeResult {
    /// The event appended on the caller's behalf, if any.
    pub trigger: Option<EventId>,
    /// Events derived by the engine, in append order.
    pub derived: Vec<EventId>,
    pub evaluations: usize,
    /// `(individual, property)` of each restriction evaluated, in order.
    pub evaluated: Vec<(EventId, String)>,
    pub status: CascadeStatus,
    pub availability: Vec<AvailabilityChange>,
    /// Evaluation faults met along the way; the faulting restriction is skipped.
    pub errors: Vec<EvalError>,
}

impl CascadeResult {
    fn new(trigger: Option<EventId>) -> Self {
        CascadeResult {
            trigger,
            derived: Vec::new(),
            evaluations: 0,
            evaluated: Vec::new(),
            status: CascadeStatus::Quiescent,
            availability: Vec::new(),
            errors: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionStatus {
    pub property: String,
    pub available: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadSummary {
    pub registration: Registration,
    /// Initiation events of the individuals created.
    pub created: Vec<EventId>,
    pub cascade: CascadeResult,
}

#[derive(Debug, Clone)]
enum Work {
    Recompute {
        individual: EventId,
        property: String,
        seed: EventId,
    },
    React(EventId),
}

#[derive(Default)]
struct Worklist {
    queue: VecDeque<Work>,
    pending: BTreeSet<(EventId, String)>,
}

impl Worklist {
    fn recompute(&mut self, individual: EventId, property: &str, seed: EventId) {
        if self.pending.insert((individual, String::from(property))) {
            self.queue.push_back(Work::Recompute {
                individual,
                property: String::from(property),
                seed,
            });
        }
    }
}

fn dedup(ids: impl IntoIterator<Item = EventId>) -> Vec<EventId> {
    let mut out = Vec::new();
    for id in ids {
        if !out.contains(&id) {
            out.push(id);
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct Engine {
    graph: Graph,
    registry: Registry,
    ids: SchemaIds,
    index: SubscriptionIndex,
    /// Individual initiation event → model name.
    model_of: BTreeMap<EventId, String>,
    /// `(source, relation)` → current targets.
    targets: BTreeMap<(EventId, String), BTreeSet<EventId>>,
    /// `(target, relation)` → sources pointing at it.
    referrers: BTreeMap<(EventId, String), BTreeSet<EventId>>,
    availability: BTreeMap<(EventId, String), bool>,
    cap: usize,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new(0)
    }
}

impl Engine {
    /// An engine holding only the built-in view schema.
    pub fn new(seed: u64) -> Self {
        Engine::with_clock(seed, || 0)
    }

    /// Like [`Engine::new`], stamping every event, genesis included, with `clock`.
    pub fn with_clock(seed: u64, clock: fn() -> u64) -> Self {
        let mut engine = Engine::empty(Graph::new(seed).with_clock(clock));
        let doc = parse_document(VIEW_GENESIS).expect("built-in schema parses");
        engine
            .load_document(&doc)
            .expect("built-in schema registers");
        engine
    }

    fn empty(graph: Graph) -> Self {
        Engine {
            graph,
            registry: Registry::new(),
            ids: SchemaIds::default(),
            index: SubscriptionIndex::default(),
            model_of: BTreeMap::new(),
            targets: BTreeMap::new(),
            referrers: BTreeMap::new(),
            availability: BTreeMap::new(),
            cap: EVALUATION_CAP,
        }
    }

    /// Rebuilds an engine over an existing graph, such as an imported one.
    /// No derivation runs; the graph already holds derived values.
    pub fn from_graph(graph: Graph) -> Result<Self, EngineError> {
        let schema = read_schema(&graph)?;
        let mut engine = Engine::empty(graph);
        engine
            .registry
            .register(&schema.document)
            .map_err(EngineError::Analysis)?;
        for info in schema.individuals {
            engine.registry.adopt_individual(info);
        }
        engine.ids = schema.ids;
        engine.index = SubscriptionIndex::build(&engine.registry);
        let individuals: Vec<EventId> = engine.graph.individuals().map(|e| e.id).collect();
        engine.adopt(&individuals);
        for &ind in &individuals {
            engine.refresh_availability(ind, &mut CascadeResult::new(None));
        }
        Ok(engine)
    }

    pub fn set_evaluation_cap(&mut self, cap: usize) {
        self.cap = cap;
    }

    pub fn set_clock(&mut self, clock: fn() -> u64) {
        self.graph.set_clock(clock);
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn schema_ids(&self) -> &SchemaIds {
        &self.ids
    }

    pub fn subscription_index(&self) -> &SubscriptionIndex {
        &self.index
    }

    pub fn analyze(&self) -> AnalysisReport {
        self.registry.analyze()
    }

    pub fn load(&mut self, source: &str) -> Result<LoadSummary, EngineError> {
        let doc = parse_document(source)?;
        self.load_document(&doc)
    }

    /// Registers a document, writes its schema and individuals to the graph
    /// and derives the initial values of the new individuals.
    pub fn load_document(&mut self, doc: &Document) -> Result<LoadSummary, EngineError> {
        let registration = self.registry.register(doc).map_err(EngineError::Analysis)?;
        let created = materialize(&mut self.graph, &mut self.ids, &self.registry, &registration)?;
        self.index = SubscriptionIndex::build(&self.registry);
        self.adopt(&created);

        let mut result = CascadeResult::new(None);
        let mut work = Worklist::default();
        for &ind in &created {
            let Some(model) = self.model_spec(ind) else { continue };
            for p in &model.properties {
                if p.set_value.is_some() || p.is_action() {
                    work.recompute(ind, &p.name, ind);
                }
            }
        }
        self.run(&mut work, &mut result);
        Ok(LoadSummary {
            registration,
            created,
            cascade: result,
        })
    }

    fn adopt(&mut self, individuals: &[EventId]) {
        for &ind in individuals {
            let Some(model_id) = self.graph.get(ind).and_then(|e| e.model) else {
                continue;
            };
            let Some(name) = self.graph.get(model_id).and_then(|e| match &e.value {
                Value::Text(s) => Some(s.clone()),
                _ => None,
            }) else {
                continue;
            };
            self.model_of.insert(ind, name);
        }
        for &ind in individuals {
            let relations: Vec<String> = match self.model_spec(ind) {
                Some(m) => m
                    .properties
                    .iter()
                    .filter(|p| p.kind == PropertyKind::Relation)
                    .map(|p| p.name.clone())
                    .collect(),
                None => continue,
            };
            for r in relations {
                self.track_relation(ind, &r);
            }
        }
    }

    fn model_spec(&self, individual: EventId) -> Option<&ModelSpec> {
        self.model_of
            .get(&individual)
            .and_then(|m| self.registry.model(m))
    }

    fn model_property(&self, individual: EventId, property: &str) -> Option<&ModelProperty> {
        self.model_spec(individual)?.property(property)
    }

    fn individual_id(&self, name: &str) -> Result<EventId, EngineError> {
        self.graph
            .individual(name)
            .filter(|id| self.model_of.contains_key(id))
            .ok_or_else(|| EngineError::UnknownIndividual(String::from(name)))
    }

    /// Name of an individual or schema event, else its id.
    fn name_of(&self, id: EventId) -> String {
        match self.graph.get(id).map(|e| &e.value) {
            Some(Value::Text(name)) => name.clone(),
            _ => format!("{id}"),
        }
    }

    /// Recomputes the referrer index for one relation slot.
    fn track_relation(&mut self, source: EventId, relation: &str) {
        let multiple = self
            .model_property(source, relation)
            .is_some_and(|p| p.multiple);
        let now: BTreeSet<EventId> = if multiple {
            self.graph
                .values(source, relation)
                .iter()
                .filter_map(|e| e.value.as_ref_id())
                .collect()
        } else {
            self.graph
                .head(source, relation)
                .and_then(|e| e.value.as_ref_id())
                .into_iter()
                .collect()
        };
        let key = (source, String::from(relation));
        let before = self.targets.remove(&key).unwrap_or_default();
        for gone in before.difference(&now) {
            if let Some(set) = self.referrers.get_mut(&(*gone, String::from(relation))) {
                set.remove(&source);
            }
        }
        for added in now.difference(&before) {
            self.referrers
                .entry((*added, String::from(relation)))
                .or_default()
                .insert(source);
        }
        if !now.is_empty() {
            self.targets.insert(key, now);
        }
    }

    /// Individuals whose `relation` currently points at `target`.
    pub fn referrers(&self, target: EventId, relation: &str) -> Vec<EventId> {
        self.referrers
            .get(&(target, String::from(relation)))
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default()
    }

    fn commit(&mut self, draft: EventDraft) -> Result<EventId, GraphError> {
        let id = self.graph.append(draft)?;
        let event = self.graph.get(id).expect("just appended");
        if let (Some(base), true) = (
            event.base,
            self.registry
                .property(&event.kind)
                .is_some_and(|p| p.kind == PropertyKind::Relation),
        ) {
            let kind = event.kind.clone();
            if self.model_of.contains_key(&base) {
                self.track_relation(base, &kind);
            }
        }
        Ok(id)
    }

    /// Queues everything that depends on `event`.
    fn dispatch(&self, event: EventId, work: &mut Worklist) {
        let Some(e) = self.graph.get(event) else { return };
        let Some(individual) = e.base.filter(|b| self.model_of.contains_key(b)) else {
            return;
        };
        let model = &self.model_of[&individual];
        if self
            .model_property(individual, &e.kind)
            .is_some_and(|p| !p.set_do.is_empty())
        {
            work.queue.push_back(Work::React(event));
        }
        for sub in self.index.subscribers(&e.kind) {
            match &sub.via {
                None => {
                    if &sub.model == model {
                        work.recompute(individual, &sub.dependent, event);
                    }
                }
                Some(relation) => {
                    if let Some(sources) = self.referrers.get(&(individual, relation.clone())) {
                        for &source in sources {
                            if self.model_of.get(&source) == Some(&sub.model) {
                                work.recompute(source, &sub.dependent, event);
                            }
                        }
                    }
                }
            }
        }
    }

    fn run(&mut self, work: &mut Worklist, result: &mut CascadeResult) {
        while let Some(item) = work.queue.pop_front() {
            match item {
                Work::Recompute {
                    individual,
                    property,
                    seed,
                } => {
                    work.pending.remove(&(individual, property.clone()));
                    if !self.spend(individual, &property, result) {
                        return;
                    }
                    self.recompute(individual, &property, seed, work, result);
                }
                Work::React(event) => {
                    if !self.react(event, work, result) {
                        return;
                    }
                }
            }
        }
    }

    fn spend(&self, individual: EventId, property: &str, result: &mut CascadeResult) -> bool {
        if result.evaluations >= self.cap {
            result.status = CascadeStatus::DepthExceeded;
            return false;
        }
        result.evaluations += 1;
        result.evaluated.push((individual, String::from(property)));
        true
    }

    fn recompute(
        &mut self,
        individual: EventId,
        property: &str,
        seed: EventId,
        work: &mut Worklist,
        result: &mut CascadeResult,
    ) {
        let Some(spec) = self.model_property(individual, property).cloned() else {
            return;
        };
        let mut ctx = EvalContext::new(&self.graph, individual);
        let gate = match &spec.condition {
            Some(c) => match evaluate(c, &mut ctx) {
                Ok(v) => truthy(&v),
                Err(e) => {
                    result.errors.push(e);
                    false
                }
            },
            None => true,
        };
        let Some(set_value) = &spec.set_value else {
            self.record_availability(individual, property, gate, result);
            return;
        };
        if !gate {
            return;
        }
        let value = match evaluate(set_value, &mut ctx) {
            Ok(v) => v,
            Err(e) => {
                result.errors.push(e);
                return;
            }
        };
        let reads = core::mem::take(&mut ctx.reads);
        if self.graph.head(individual, property).map(|h| &h.value) == Some(&value) {
            return;
        }
        if value.is_null() && self.graph.head(individual, property).is_none() {
            return;
        }
        let draft = EventDraft::new(property, value)
            .base(individual)
            .cause(dedup(core::iter::once(seed).chain(reads)))
            .model(self.ids.model(&self.model_of[&individual]));
        match self.commit(draft) {
            Ok(id) => {
                result.derived.push(id);
                self.dispatch(id, work);
            }
            Err(_) => unreachable!("derived events only reference existing events"),
        }
    }

    fn record_availability(
        &mut self,
        individual: EventId,
        property: &str,
        available: bool,
        result: &mut CascadeResult,
    ) {
        let previous = self
            .availability
            .insert((individual, String::from(property)), available);
        if previous != Some(available) {
            result.availability.push(AvailabilityChange {
                individual,
                property: String::from(property),
                available,
            });
        }
    }

    fn refresh_availability(&mut self, individual: EventId, result: &mut CascadeResult) {
        let Some(model) = self.model_spec(individual) else { return };
        let actions: Vec<(String, bool)> = model
            .actions()
            .map(|a| {
                let mut ctx = EvalContext::new(&self.graph, individual);
                let ok = a
                    .condition
                    .as_ref()
                    .and_then(|c| evaluate(c, &mut ctx).ok())
                    .is_some_and(|v| truthy(&v));
                (a.name.clone(), ok)
            })
            .collect();
        for (name, ok) in actions {
            self.record_availability(individual, &name, ok, result);
        }
    }

    /// Runs the `SetDo` of the property `event` assigned. Returns false when
    /// the evaluation budget ran out.
    fn react(&mut self, event: EventId, work: &mut Worklist, result: &mut CascadeResult) -> bool {
        let Some(e) = self.graph.get(event).cloned() else { return true };
        let Some(individual) = e.base else { return true };
        let Some(spec) = self.model_property(individual, &e.kind).cloned() else {
            return true;
        };
        for action in &spec.set_do {
            if !self.spend(individual, &e.kind, result) {
                return false;
            }
            let mut ctx = EvalContext::new(&self.graph, individual).with_trigger(e.value.clone());
            match evaluate(&action.guard, &mut ctx) {
                Ok(v) if truthy(&v) => {}
                Ok(_) => continue,
                Err(err) => {
                    result.errors.push(err);
                    continue;
                }
            }
            let target = match evaluate(&action.target, &mut ctx) {
                Ok(Value::Ref(t)) if self.model_of.contains_key(&t) => t,
                Ok(Value::Null) => continue,
                Ok(other) => {
                    result.errors.push(EvalError::BadTarget(ctx.canonical(&other)));
                    continue;
                }
                Err(err) => {
                    result.errors.push(err);
                    continue;
                }
            };
            let reads = core::mem::take(&mut ctx.reads);
            let cause = dedup(core::iter::once(event).chain(reads));
            let model_id = self.ids.model(&self.model_of[&target]);
            for (key, literal) in &action.assignments {
                if self.model_property(target, key).is_none() {
                    result.errors.push(EvalError::NotInModel {
                        individual: self.name_of(target),
                        property: key.clone(),
                    });
                    continue;
                }
                let value = match self.literal_value(key, literal) {
                    Ok(v) => v,
                    Err(_) => {
                        result.errors.push(EvalError::BadTarget(format!("{literal:?}")));
                        continue;
                    }
                };
                let draft = EventDraft::new(key.as_str(), value)
                    .base(target)
                    .cause(cause.clone())
                    .model(model_id);
                if let Ok(id) = self.commit(draft) {
                    result.derived.push(id);
                    self.dispatch(id, work);
                }
            }
        }
        true
    }

    fn literal_value(&self, property: &str, literal: &Literal) -> Result<Value, EngineError> {
        let raw = match literal {
            Literal::Number(n) => Value::Number(*n),
            Literal::Text(s) => Value::Text(s.clone()),
        };
        self.coerce(property, raw)
    }

    /// Converts a value to the declared type of `property`.
    fn coerce(&self, property: &str, value: Value) -> Result<Value, EngineError> {
        let invalid = |detail: String| EngineError::InvalidValue {
            property: String::from(property),
            detail,
        };
        let Some(spec) = self.registry.property(property) else {
            return Err(invalid(String::from("undeclared property")));
        };
        match spec.kind {
            PropertyKind::Relation => {
                let target = match &value {
                    Value::Text(name) => self
                        .graph
                        .individual(name)
                        .ok_or_else(|| invalid(format!("no individual named `{name}`")))?,
                    Value::Ref(id) if self.model_of.contains_key(id) => *id,
                    other => return Err(invalid(format!("{other} is not an individual"))),
                };
                let range = spec.range.as_deref().unwrap_or(ANY_INDIVIDUAL);
                let concept = self
                    .registry
                    .individual(&self.name_of(target))
                    .map(|i| i.concept.as_str())
                    .unwrap_or("");
                if range != ANY_INDIVIDUAL && concept != range {
                    return Err(invalid(format!("`{}` is not a {range}", self.name_of(target))));
                }
                Ok(Value::Ref(target))
            }
            PropertyKind::Attribute => match spec.data_type.unwrap_or(DataType::String) {
                DataType::String => Ok(match value {
                    Value::Number(n) => Value::Text(crate::event::format_number(n)),
                    other => other,
                }),
                DataType::Numeric => value
                    .as_number()
                    .filter(|n| n.is_finite())
                    .map(Value::Number)
                    .ok_or_else(|| invalid(format!("{value} is not Numeric"))),
                DataType::Boolean => match value.as_number() {
                    Some(n) if n == 0.0 || n == 1.0 => Ok(Value::Number(n)),
                    _ => Err(invalid(format!("{value} is not Boolean (0 or 1)"))),
                },
            },
        }
    }

    pub fn current_value(&self, individual: &str, property: &str) -> Result<Value, EngineError> {
        let id = self.individual_id(individual)?;
        Ok(self.graph.value_of(id, property))
    }

    /// Current values of the individual's model properties, in declaration order.
    pub fn state(&self, individual: &str) -> Result<Vec<(String, Value)>, EngineError> {
        let id = self.individual_id(individual)?;
        let model = self
            .model_spec(id)
            .ok_or_else(|| EngineError::UnknownIndividual(String::from(individual)))?;
        Ok(model
            .properties
            .iter()
            .map(|p| (p.name.clone(), self.graph.value_of(id, &p.name)))
            .collect())
    }

    pub fn model_name(&self, individual: &str) -> Result<&str, EngineError> {
        let id = self.individual_id(individual)?;
        Ok(self.model_of[&id].as_str())
    }

    /// Every action of the individual's model with its condition evaluated
    /// now, in declaration order.
    pub fn available_actions(&self, individual: &str) -> Result<Vec<ActionStatus>, EngineError> {
        let id = self.individual_id(individual)?;
        let Some(model) = self.model_spec(id) else {
            return Ok(Vec::new());
        };
        Ok(model
            .actions()
            .map(|a| {
                let mut ctx = EvalContext::new(&self.graph, id);
                let available = a
                    .condition
                    .as_ref()
                    .and_then(|c| evaluate(c, &mut ctx).ok())
                    .is_some_and(|v| truthy(&v));
                ActionStatus {
                    property: a.name.clone(),
                    available,
                }
            })
            .collect())
    }

    /// Names of the actions available now.
    pub fn available(&self, individual: &str) -> Result<Vec<String>, EngineError> {
        Ok(self
            .available_actions(individual)?
            .into_iter()
            .filter(|a| a.available)
            .map(|a| a.property)
            .collect())
    }

    /// Availability as maintained incrementally by cascades.
    pub fn cached_availability(&self, individual: &str) -> Result<Vec<ActionStatus>, EngineError> {
        let id = self.individual_id(individual)?;
        let Some(model) = self.model_spec(id) else {
            return Ok(Vec::new());
        };
        Ok(model
            .actions()
            .map(|a| ActionStatus {
                property: a.name.clone(),
                available: self
                    .availability
                    .get(&(id, a.name.clone()))
                    .copied()
                    .unwrap_or(false),
            })
            .collect())
    }

    /// Appends an action event for `actor` if the action's condition holds,
    /// then runs its `SetDo` and every dependent derivation.
    pub fn trigger_action(
        &mut self,
        individual: &str,
        action: &str,
        value: Value,
        actor: &str,
    ) -> Result<CascadeResult, EngineError> {
        let id = self.individual_id(individual)?;
        let spec = match self.model_property(id, action) {
            Some(p) if p.is_action() => p.clone(),
            _ => {
                return Err(EngineError::UnknownAction {
                    individual: String::from(individual),
                    property: String::from(action),
                })
            }
        };
        let mut result = CascadeResult::new(None);
        result.evaluations = 1;
        result.evaluated.push((id, String::from(action)));
        let mut ctx = EvalContext::new(&self.graph, id);
        let condition = spec.condition.as_ref().expect("actions have a condition");
        if !truthy(&evaluate(condition, &mut ctx)?) {
            return Err(EngineError::ActionUnavailable {
                individual: String::from(individual),
                property: String::from(action),
            });
        }
        let reads = core::mem::take(&mut ctx.reads);
        let cause = if reads.is_empty() { alloc::vec![id] } else { reads };
        let value = self.coerce(action, value)?;
        self.append_and_run(id, action, value, actor, cause, result)
    }

    /// Appends a value for an editable property on behalf of `actor` and
    /// runs the cascade.
    pub fn set_property(
        &mut self,
        individual: &str,
        property: &str,
        value: Value,
        actor: &str,
    ) -> Result<CascadeResult, EngineError> {
        let id = self.individual_id(individual)?;
        let spec = self
            .model_property(id, property)
            .cloned()
            .ok_or_else(|| EngineError::UnknownProperty {
                individual: String::from(individual),
                property: String::from(property),
            })?;
        if spec.set_value.is_some() {
            return Err(EngineError::NotEditable {
                property: String::from(property),
            });
        }
        let mut result = CascadeResult::new(None);
        let mut cause = alloc::vec![id];
        if let Some(condition) = &spec.condition {
            result.evaluations = 1;
            result.evaluated.push((id, String::from(property)));
            let mut ctx = EvalContext::new(&self.graph, id);
            if !truthy(&evaluate(condition, &mut ctx)?) {
                return Err(EngineError::ActionUnavailable {
                    individual: String::from(individual),
                    property: String::from(property),
                });
            }
            cause.extend(ctx.reads);
        }
        let value = self.coerce(property, value)?;
        self.append_and_run(id, property, value, actor, dedup(cause), result)
    }

    fn append_and_run(
        &mut self,
        individual: EventId,
        property: &str,
        value: Value,
        actor: &str,
        cause: Vec<EventId>,
        mut result: CascadeResult,
    ) -> Result<CascadeResult, EngineError> {
        let draft = EventDraft::new(property, value)
            .base(individual)
            .actor(actor)
            .cause(cause)
            .model(self.ids.model(&self.model_of[&individual]));
        let id = self.commit(draft)?;
        result.trigger = Some(id);
        let mut work = Worklist::default();
        self.dispatch(id, &mut work);
        self.run(&mut work, &mut result);
        Ok(result)
    }

    /// The whole graph in append order.
    pub fn export(&self) -> Vec<Event> {
        self.graph.events().to_vec()
    }

    /// Rebuilds an engine from an exported document. Ids are reassigned.
    pub fn import(document: &[Event], seed: u64) -> Result<Self, EngineError> {
        let (graph, _) = Graph::import(document, seed)?;
        Engine::from_graph(graph)
    }

    /// Appends an arbitrary event and runs its cascade.
    pub fn append(&mut self, draft: EventDraft) -> Result<CascadeResult, EngineError> {
        let id = self.commit(draft)?;
        let mut result = self.ingest(id)?;
        result.trigger = Some(id);
        Ok(result)
    }

    /// Runs the cascade of an event already in the graph.
    pub fn ingest(&mut self, event: EventId) -> Result<CascadeResult, EngineError> {
        if !self.graph.contains(event) {
            return Err(GraphError::UnknownEvent(event).into());
        }
        let mut result = CascadeResult::new(None);
        let mut work = Worklist::default();
        self.dispatch(event, &mut work);
        self.run(&mut work, &mut result);
        Ok(result)
    }

    /// `(individual, property, value)` of every value event on an
    /// individual, in append order.
    pub fn value_sequence(&self) -> Vec<(String, String, Value)> {
        self.graph
            .events()
            .iter()
            .filter_map(|e| {
                let base = e.base?;
                let name = self.graph.individual_name(base)?;
                let value = match &e.value {
                    Value::Ref(t) => Value::Text(self.name_of(*t)),
                    other => other.clone(),
                };
                Some((String::from(name), e.kind.clone(), value))
            })
            .collect()
    }

    /// Event with a readable name for its base and value, for transcripts.
    pub fn describe(&self, event: &Event) -> String {
        let base = event.base.map(|b| self.name_of(b)).unwrap_or_default();
        let value = match &event.value {
            Value::Ref(t) => self.name_of(*t),
            other => format!("{other}"),
        };
        format!("{base}.{} := {value}", event.kind)
    }
}
