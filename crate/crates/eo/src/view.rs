//! Resolution of `View` individuals into renderable state.

use eo_core::{Engine, EventId, Value};
use serde::Serialize;

const VIEW_CONCEPT: &str = "View";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ViewError {
    #[error("no view named `{0}`")]
    UnknownView(String),
    #[error("view `{0}` does not name an individual")]
    NoTarget(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub property: String,
    pub value: serde_json::Value,
    /// The property is bound to a control and shown as a button instead.
    pub excluded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Control {
    pub property: String,
    pub title: String,
    pub control_type: String,
    pub send_value: serde_json::Value,
    pub enabled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViewState {
    pub view_id: String,
    pub concept_page: String,
    pub individual: String,
    pub mode: String,
    pub rows: Vec<Row>,
    pub controls: Vec<Control>,
}

/// Display form of a value: references become the referenced name.
pub fn display_value(engine: &Engine, value: &Value) -> serde_json::Value {
    match value {
        Value::Ref(id) => match engine.graph().individual_name(*id) {
            Some(name) => name.into(),
            None => id.to_string().into(),
        },
        other => crate::format::value_to_json(other),
    }
}

fn text(engine: &Engine, base: EventId, property: &str) -> Option<String> {
    match engine.graph().head(base, property).map(|e| &e.value) {
        Some(Value::Text(s)) => Some(s.clone()),
        Some(Value::Number(n)) => Some(eo_core::event::format_number(*n)),
        Some(Value::Ref(id)) => engine.graph().individual_name(*id).map(String::from),
        _ => None,
    }
}

fn texts(engine: &Engine, base: EventId, property: &str) -> Vec<String> {
    engine
        .graph()
        .values(base, property)
        .iter()
        .filter_map(|e| match &e.value {
            Value::Text(s) => Some(s.clone()),
            _ => None,
        })
        .collect()
}

fn is_view(engine: &Engine, name: &str) -> bool {
    engine
        .registry()
        .individual(name)
        .is_some_and(|i| i.concept == VIEW_CONCEPT)
}

/// Names of every registered view, in registration order.
pub fn views(engine: &Engine) -> Vec<String> {
    engine
        .registry()
        .individuals()
        .iter()
        .filter(|i| i.concept == VIEW_CONCEPT)
        .map(|i| i.name.clone())
        .collect()
}

/// Views whose target is `individual`.
pub fn views_of(engine: &Engine, individual: &str) -> Vec<String> {
    views(engine)
        .into_iter()
        .filter(|v| resolve_view(engine, v).is_ok_and(|s| s.individual == individual))
        .collect()
}

pub fn resolve_view(engine: &Engine, name: &str) -> Result<ViewState, ViewError> {
    if !is_view(engine, name) {
        return Err(ViewError::UnknownView(name.into()));
    }
    let graph = engine.graph();
    let view = graph
        .individual(name)
        .ok_or_else(|| ViewError::UnknownView(name.into()))?;
    let concept_page = text(engine, view, "ConceptPage").unwrap_or_default();
    let section = graph.head(view, "ViewConcept").map(|e| e.id);
    let target = text(engine, view, "IndividualID")
        .or_else(|| section.and_then(|s| text(engine, s, "Individuallist")))
        .ok_or_else(|| ViewError::NoTarget(name.into()))?;

    let (mode, include, exclude, control_events) = match section {
        Some(s) => (
            text(engine, s, "ViewMode").unwrap_or_else(|| eo_core::models::SHOWCASE.into()),
            texts(engine, s, "Include"),
            texts(engine, s, "Exclude"),
            graph.values(s, "Control").iter().map(|e| e.id).collect::<Vec<_>>(),
        ),
        None => (eo_core::models::SHOWCASE.into(), vec![], vec![], vec![]),
    };

    let available = engine.available_actions(&target).map_err(|_| ViewError::NoTarget(name.into()))?;
    let mut controls = Vec::new();
    for c in control_events {
        let Some(Value::Text(property)) = graph.get(c).map(|e| e.value.clone()) else {
            continue;
        };
        let enabled = available.iter().any(|a| a.property == property && a.available);
        controls.push(Control {
            title: text(engine, c, "Title").unwrap_or_else(|| property.clone()),
            control_type: text(engine, c, "ControlType").unwrap_or_else(|| "button".into()),
            send_value: graph
                .head(c, "Value")
                .map(|e| display_value(engine, &e.value))
                .unwrap_or_else(|| 1.into()),
            enabled,
            property,
        });
    }

    let state = engine.state(&target).map_err(|_| ViewError::NoTarget(name.into()))?;
    let rows = state
        .into_iter()
        .filter(|(p, _)| include.is_empty() || include.contains(p))
        .filter(|(p, _)| !exclude.contains(p))
        .map(|(property, value)| Row {
            value: display_value(engine, &value),
            excluded: controls.iter().any(|c| c.property == property),
            property,
        })
        .collect();

    Ok(ViewState {
        view_id: name.into(),
        concept_page,
        individual: target,
        mode,
        rows,
        controls,
    })
}

/// The value a view control sends for `action` on `individual`, if some
/// view declares one.
pub fn control_value(engine: &Engine, individual: &str, action: &str) -> Option<Value> {
    for v in views(engine) {
        let Ok(state) = resolve_view(engine, &v) else { continue };
        if state.individual != individual {
            continue;
        }
        if let Some(c) = state.controls.iter().find(|c| c.property == action) {
            return crate::format::value_from_json(&c.send_value).ok();
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use eo_core::scenarios::WINTER_FEAST;

    fn feast() -> Engine {
        let mut e = Engine::new(1);
        e.load(WINTER_FEAST).unwrap();
        e
    }

    fn row<'a>(s: &'a ViewState, p: &str) -> Option<&'a Row> {
        s.rows.iter().find(|r| r.property == p)
    }

    #[test]
    fn survivor_view_in_the_cold() {
        let mut e = feast();
        for (p, v) in [("energy", 20.0), ("warmth", 20.0)] {
            e.set_property("John Doe", p, Value::Number(v), "player").unwrap();
        }
        let s = resolve_view(&e, "View Survivor").unwrap();
        assert_eq!(s.individual, "John Doe");
        assert_eq!(s.mode, "showcase");
        assert_eq!(row(&s, "energy").unwrap().value, 20.0);
        assert_eq!(row(&s, "warmthLow").unwrap().value, 1.0);
        assert_eq!(row(&s, "location").unwrap().value, "Forest Clearing");
        for hidden in ["_reaction_warm_up", "energyMin", "warmthMin"] {
            assert!(row(&s, hidden).is_none());
        }
        let enabled: Vec<_> = s.controls.iter().map(|c| (c.title.as_str(), c.enabled)).collect();
        assert_eq!(
            enabled,
            [
                ("Gather Wood", true),
                ("Light Fire", false),
                ("Hunt Deer", false),
                ("Cook Meat", false),
                ("Eat Food", false)
            ]
        );
        assert!(row(&s, "action_gather").unwrap().excluded);
        assert_eq!(control_value(&e, "John Doe", "action_gather"), Some(Value::Text("1".into())));
    }

    #[test]
    fn location_view_has_no_controls() {
        let e = feast();
        let s = resolve_view(&e, "View Location").unwrap();
        assert_eq!(s.individual, "Forest Clearing");
        assert!(s.controls.is_empty());
        for (p, v) in [("hasTree", 1.0), ("hasDeer", 1.0), ("hasFire", 0.0)] {
            assert_eq!(row(&s, p).unwrap().value, v);
        }
    }

    #[test]
    fn unknown_views() {
        let e = feast();
        assert_eq!(resolve_view(&e, "John Doe"), Err(ViewError::UnknownView("John Doe".into())));
        assert!(resolve_view(&e, "Nowhere").is_err());
        assert_eq!(views_of(&e, "John Doe"), ["View Survivor"]);
    }
}
