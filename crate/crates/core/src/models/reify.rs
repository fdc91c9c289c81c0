//! Schema and individuals as events, and back.
//!
//! | event       | base                 | type                  | value               |
//! |-------------|----------------------|-----------------------|---------------------|
//! | concept     | none                 | `Concept`             | name                |
//! | property    | none                 | `Attribute`/`Relation`| name                |
//! | type info   | property             | `DataType`/`Range`    | type or concept     |
//! | model       | concept              | `Model`               | name                |
//! | use         | model or parent use  | `Attribute`/`Relation`| ref to property     |
//! | restriction | use                  | restriction keyword   | printed payload     |
//! | individual  | concept              | `Individual`          | name                |

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{IndividualInfo, PlannedScalar, PlannedValue, Registration, Registry};
use crate::bsl::{
    parse_expression, parse_setdo, print_expression, print_setdo, ConceptDecl, DataType,
    Declaration, Document, IndividualDecl, Literal, ModelDecl, PropertyDecl, PropertyKind,
    PropertyUse, Restriction,
};
use crate::event::{format_number, Event, EventDraft, EventId, Value};
use crate::graph::{Graph, GraphError, INDIVIDUAL_KIND};

pub const CONCEPT_KIND: &str = "Concept";
pub const MODEL_KIND: &str = "Model";
pub const SET_MODEL_KIND: &str = "SetModel";

/// Event ids of schema declarations by name.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SchemaIds {
    pub concepts: BTreeMap<String, EventId>,
    pub properties: BTreeMap<String, EventId>,
    pub models: BTreeMap<String, EventId>,
}

impl SchemaIds {
    pub fn model(&self, name: &str) -> Option<EventId> {
        self.models.get(name).copied()
    }
}

fn missing(what: &str, name: &str) -> GraphError {
    GraphError::CorruptDocument(format!("{what} `{name}` has no schema event"))
}

fn restriction_payload(r: &Restriction) -> String {
    match r {
        Restriction::Condition(e) | Restriction::SetValue(e) => print_expression(e),
        Restriction::SetDo(actions) => print_setdo(actions),
        Restriction::Default(Literal::Number(n)) => format_number(*n),
        Restriction::Default(Literal::Text(s)) => s.clone(),
        Restriction::Multiple(b) | Restriction::Required(b) => String::from(if *b { "1" } else { "0" }),
        Restriction::Unsupported { raw, .. } => raw.clone(),
    }
}

fn write_use(
    graph: &mut Graph,
    ids: &SchemaIds,
    parent: EventId,
    use_: &PropertyUse,
) -> Result<(), GraphError> {
    let decl = *ids
        .properties
        .get(&use_.property)
        .ok_or_else(|| missing("property", &use_.property))?;
    let id = graph.append(
        EventDraft::new(use_.kind.keyword(), Value::Ref(decl))
            .base(parent)
            .cause(alloc::vec![decl]),
    )?;
    for r in &use_.restrictions {
        graph.append(EventDraft::new(r.keyword(), Value::Text(restriction_payload(r))).base(id))?;
    }
    for n in &use_.nested {
        write_use(graph, ids, id, n)?;
    }
    Ok(())
}

fn write_value(
    graph: &mut Graph,
    base: EventId,
    model: EventId,
    value: &PlannedValue,
) -> Result<(), GraphError> {
    let v = match &value.value {
        PlannedScalar::Number(n) => Value::Number(*n),
        PlannedScalar::Text(s) => Value::Text(s.clone()),
        PlannedScalar::Individual(name) => Value::Ref(
            graph
                .individual(name)
                .ok_or_else(|| GraphError::UnknownIndividual(name.clone()))?,
        ),
    };
    let id = graph.append(
        EventDraft::new(value.property.as_str(), v)
            .base(base)
            .cause(alloc::vec![base])
            .model(Some(model)),
    )?;
    for n in &value.nested {
        write_value(graph, id, model, n)?;
    }
    Ok(())
}

/// Writes the events for everything a registration added. Returns the
/// initiation events of the new individuals.
pub fn materialize(
    graph: &mut Graph,
    ids: &mut SchemaIds,
    registry: &Registry,
    registration: &Registration,
) -> Result<Vec<EventId>, GraphError> {
    for name in &registration.concepts {
        let id = graph.append(EventDraft::new(CONCEPT_KIND, Value::Text(name.clone())))?;
        ids.concepts.insert(name.clone(), id);
    }
    for name in &registration.properties {
        let spec = registry.property(name).ok_or_else(|| missing("property", name))?;
        let id = graph.append(EventDraft::new(spec.kind.keyword(), Value::Text(name.clone())))?;
        if let Some(dt) = spec.data_type {
            graph.append(EventDraft::new("DataType", Value::Text(dt.name().into())).base(id))?;
        }
        if let Some(range) = &spec.range {
            graph.append(EventDraft::new("Range", Value::Text(range.clone())).base(id))?;
        }
        ids.properties.insert(name.clone(), id);
    }
    for name in &registration.models {
        let spec = registry.model(name).ok_or_else(|| missing("model", name))?;
        let concept = *ids
            .concepts
            .get(&spec.concept)
            .ok_or_else(|| missing("concept", &spec.concept))?;
        let id = graph.append(
            EventDraft::new(MODEL_KIND, Value::Text(name.clone()))
                .base(concept)
                .cause(alloc::vec![concept]),
        )?;
        ids.models.insert(name.clone(), id);
        for use_ in &spec.decl.properties {
            write_use(graph, ids, id, use_)?;
        }
    }
    let mut created = Vec::new();
    for plan in &registration.individuals {
        let concept = *ids
            .concepts
            .get(&plan.concept)
            .ok_or_else(|| missing("concept", &plan.concept))?;
        let model = ids.model(&plan.model).ok_or_else(|| missing("model", &plan.model))?;
        let id = graph.append(
            EventDraft::new(INDIVIDUAL_KIND, Value::Text(plan.name.clone()))
                .base(concept)
                .cause(alloc::vec![model])
                .model(Some(model)),
        )?;
        graph.append(
            EventDraft::new(SET_MODEL_KIND, Value::Ref(model))
                .base(id)
                .cause(alloc::vec![id])
                .model(Some(model)),
        )?;
        created.push(id);
    }
    for (plan, &id) in registration.individuals.iter().zip(&created) {
        let model = ids.model(&plan.model).expect("written above");
        for v in &plan.values {
            write_value(graph, id, model, v)?;
        }
    }
    Ok(created)
}

/// Schema recovered from a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredSchema {
    /// Concept, property and model declarations in append order.
    pub document: Document,
    pub ids: SchemaIds,
    pub individuals: Vec<IndividualInfo>,
}

fn text(event: &Event) -> Option<&str> {
    match &event.value {
        Value::Text(s) => Some(s),
        _ => None,
    }
}

fn corrupt(event: &Event, why: &str) -> GraphError {
    GraphError::CorruptDocument(format!("schema event {}: {why}", event.id))
}

fn read_restriction(event: &Event) -> Result<Option<Restriction>, GraphError> {
    let Some(payload) = text(event) else {
        return Ok(None);
    };
    let flag = |s: &str| s.trim() == "1";
    let parsed = match event.kind.as_str() {
        "Condition" => Restriction::Condition(parse_expression(payload).map_err(|e| corrupt(event, &format!("{e}")))?),
        "SetValue" => Restriction::SetValue(parse_expression(payload).map_err(|e| corrupt(event, &format!("{e}")))?),
        "SetDo" => Restriction::SetDo(parse_setdo(payload).map_err(|e| corrupt(event, &format!("{e}")))?),
        "Default" => Restriction::Default(Literal::from_text(payload)),
        "Multiple" => Restriction::Multiple(flag(payload)),
        "Required" => Restriction::Required(flag(payload)),
        kind if PropertyKind::from_keyword(kind).is_some() => return Ok(None),
        kind => Restriction::Unsupported {
            kind: String::from(kind),
            raw: String::from(payload),
        },
    };
    Ok(Some(parsed))
}

fn read_uses(graph: &Graph, parent: EventId) -> Result<Vec<PropertyUse>, GraphError> {
    let mut out = Vec::new();
    for child in graph.children(parent) {
        let Some(kind) = PropertyKind::from_keyword(&child.kind) else {
            continue;
        };
        let Value::Ref(decl) = child.value else {
            continue;
        };
        let name = graph
            .get(decl)
            .and_then(text)
            .ok_or_else(|| corrupt(child, "property use does not name a property"))?;
        let mut use_ = PropertyUse::new(kind, name);
        for r in graph.children(child.id) {
            if let Some(restriction) = read_restriction(r)? {
                use_.restrictions.push(restriction);
            }
        }
        use_.nested = read_uses(graph, child.id)?;
        out.push(use_);
    }
    Ok(out)
}

/// Recovers the schema and the individual table written by [`materialize`].
pub fn read_schema(graph: &Graph) -> Result<StoredSchema, GraphError> {
    let mut document = Document::default();
    let mut ids = SchemaIds::default();
    let mut individuals = Vec::new();
    let mut concept_names: BTreeMap<EventId, String> = BTreeMap::new();
    let mut model_names: BTreeMap<EventId, String> = BTreeMap::new();
    for event in graph.events() {
        match (event.base, event.kind.as_str()) {
            (None, CONCEPT_KIND) => {
                let name = text(event).ok_or_else(|| corrupt(event, "concept without name"))?;
                ids.concepts.insert(name.into(), event.id);
                concept_names.insert(event.id, name.into());
                document
                    .declarations
                    .push(Declaration::Concept(ConceptDecl { name: name.into() }));
            }
            (None, kind) if PropertyKind::from_keyword(kind).is_some() => {
                let name = text(event).ok_or_else(|| corrupt(event, "property without name"))?;
                let info = |k: &str| graph.head(event.id, k).and_then(text).map(String::from);
                ids.properties.insert(name.into(), event.id);
                document.declarations.push(Declaration::Property(PropertyDecl {
                    kind: PropertyKind::from_keyword(kind).expect("matched"),
                    name: name.into(),
                    data_type: info("DataType").as_deref().and_then(DataType::from_name),
                    range: info("Range"),
                }));
            }
            (Some(base), MODEL_KIND) if concept_names.contains_key(&base) => {
                let name = text(event).ok_or_else(|| corrupt(event, "model without name"))?;
                ids.models.insert(name.into(), event.id);
                model_names.insert(event.id, name.into());
                document.declarations.push(Declaration::Model(ModelDecl {
                    concept: concept_names[&base].clone(),
                    name: name.into(),
                    properties: read_uses(graph, event.id)?,
                }));
            }
            (Some(base), INDIVIDUAL_KIND) if concept_names.contains_key(&base) => {
                let name = text(event).ok_or_else(|| corrupt(event, "individual without name"))?;
                let model = event
                    .model
                    .and_then(|m| model_names.get(&m))
                    .ok_or_else(|| corrupt(event, "individual without a known model"))?;
                let mut initialized = Vec::new();
                let mut seen = BTreeSet::new();
                for child in graph.children(event.id) {
                    if child.kind != SET_MODEL_KIND && seen.insert(child.kind.as_str()) {
                        initialized.push(child.kind.clone());
                    }
                }
                individuals.push(IndividualInfo {
                    name: name.into(),
                    concept: concept_names[&base].clone(),
                    model: model.clone(),
                    initialized,
                });
            }
            _ => {}
        }
    }
    Ok(StoredSchema {
        document,
        ids,
        individuals,
    })
}

/// Individual declarations reconstructed from current graph state, one
/// value line per live top-level value.
pub fn individual_decl(graph: &Graph, info: &IndividualInfo) -> Option<IndividualDecl> {
    let id = graph.individual(&info.name)?;
    let mut values = Vec::new();
    for child in graph.children(id) {
        if child.kind == SET_MODEL_KIND || values.iter().any(|v: &crate::bsl::ValueLine| v.property == child.kind) {
            continue;
        }
        if let Some(head) = graph.head(id, &child.kind) {
            let value = match &head.value {
                Value::Ref(t) => graph.individual_name(*t)?.into(),
                Value::Null | Value::Retract(_) => continue,
                other => format!("{other}"),
            };
            values.push(crate::bsl::ValueLine {
                depth: 1,
                property: child.kind.clone(),
                value,
            });
        }
    }
    Some(IndividualDecl {
        concept: info.concept.clone(),
        name: info.name.clone(),
        model: Some(info.model.clone()),
        values,
    })
}
