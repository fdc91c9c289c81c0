//! JSON documents exchanged by the service and printed by the CLI.

use eo_core::models::{Diagnostic, Registration};
use eo_core::{AnalysisReport, CascadeResult, CascadeStatus, CausalTrace, Engine};
use serde_json::{json, Value as Json};

use crate::format::Record;

pub fn diagnostic(d: &Diagnostic) -> Json {
    json!({ "code": d.code, "location": d.location, "message": d.message })
}

pub fn report(r: &AnalysisReport) -> Json {
    json!({
        "errors": r.errors.iter().map(diagnostic).collect::<Vec<_>>(),
        "warnings": r.warnings.iter().map(diagnostic).collect::<Vec<_>>(),
    })
}

pub fn registration(r: &Registration) -> Json {
    json!({
        "concepts": r.concepts,
        "properties": r.properties,
        "models": r.models,
        "individuals": r.individuals.iter().map(|i| &i.name).collect::<Vec<_>>(),
        "warnings": r.warnings.iter().map(diagnostic).collect::<Vec<_>>(),
    })
}

pub fn cascade(engine: &Engine, r: &CascadeResult) -> Json {
    let records: Vec<Record> = r
        .trigger
        .iter()
        .chain(&r.derived)
        .filter_map(|id| engine.graph().get(*id))
        .map(Record::from)
        .collect();
    json!({
        "trigger": r.trigger.map(|t| t.to_string()),
        "events": records,
        "derived": r.derived.len(),
        "evaluations": r.evaluations,
        "status": match r.status {
            CascadeStatus::Quiescent => "Quiescent",
            CascadeStatus::DepthExceeded => "DepthExceeded",
        },
        "errors": r.errors.iter().map(ToString::to_string).collect::<Vec<_>>(),
    })
}

pub fn trace(engine: &Engine, t: &CausalTrace) -> Json {
    let nodes: Vec<Record> = t
        .nodes
        .iter()
        .filter_map(|id| engine.graph().get(*id))
        .map(Record::from)
        .collect();
    json!({
        "root": t.root.to_string(),
        "depth": t.depth,
        "nodes": nodes,
        "edges": t.edges.iter().map(|(e, c)| [e.to_string(), c.to_string()]).collect::<Vec<_>>(),
    })
}
