//! Portable graph documents: one JSON record per line, in append order.

use std::io::{BufRead, Write};

use eo_core::{Event, EventId, Value};
use serde::{Deserialize, Serialize};
use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("line {line}: {detail}")]
    Record { line: usize, detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Wire shape of one event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    pub base: Option<String>,
    #[serde(rename = "type")]
    pub kind: String,
    pub value: serde_json::Value,
    pub actor: String,
    pub cause: Vec<String>,
    pub model: Option<String>,
    pub ts: u64,
}

pub fn value_to_json(value: &Value) -> serde_json::Value {
    match value {
        Value::Null => serde_json::Value::Null,
        Value::Number(n) => json!(n),
        Value::Text(s) => json!(s),
        Value::Ref(id) => json!({ "ref": id.to_string() }),
        Value::Retract(id) => json!({ "retract": id.to_string() }),
    }
}

pub fn value_from_json(v: &serde_json::Value) -> Result<Value, String> {
    let id = |s: &serde_json::Value| -> Result<EventId, String> {
        s.as_str()
            .ok_or_else(|| format!("expected an id string, got {s}"))?
            .parse()
            .map_err(|e| format!("{e}"))
    };
    Ok(match v {
        serde_json::Value::Null => Value::Null,
        serde_json::Value::Number(n) => Value::Number(n.as_f64().ok_or("number out of range")?),
        serde_json::Value::String(s) => Value::Text(s.clone()),
        serde_json::Value::Object(map) if map.len() == 1 => match map.iter().next() {
            Some((k, target)) if k == "ref" => Value::Ref(id(target)?),
            Some((k, target)) if k == "retract" => Value::Retract(id(target)?),
            _ => return Err(format!("unknown value object {v}")),
        },
        other => return Err(format!("unsupported value {other}")),
    })
}

impl From<&Event> for Record {
    fn from(e: &Event) -> Self {
        Record {
            id: e.id.to_string(),
            base: e.base.map(|b| b.to_string()),
            kind: e.kind.clone(),
            value: value_to_json(&e.value),
            actor: e.actor.clone(),
            cause: e.cause.iter().map(ToString::to_string).collect(),
            model: e.model.map(|m| m.to_string()),
            ts: e.timestamp,
        }
    }
}

impl Record {
    pub fn into_event(self) -> Result<Event, String> {
        let id = |s: &str| s.parse::<EventId>().map_err(|e| e.to_string());
        Ok(Event {
            id: id(&self.id)?,
            base: self.base.as_deref().map(id).transpose()?,
            kind: self.kind,
            value: value_from_json(&self.value)?,
            actor: self.actor,
            cause: self.cause.iter().map(|c| id(c)).collect::<Result<_, _>>()?,
            model: self.model.as_deref().map(id).transpose()?,
            timestamp: self.ts,
        })
    }
}

pub fn write_jsonl<'a>(
    events: impl IntoIterator<Item = &'a Event>,
    mut out: impl Write,
) -> Result<(), FormatError> {
    for e in events {
        serde_json::to_writer(&mut out, &Record::from(e)).map_err(|source| FormatError::Json { line: 0, source })?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn to_jsonl<'a>(events: impl IntoIterator<Item = &'a Event>) -> String {
    let mut buf = Vec::new();
    write_jsonl(events, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("json is utf-8")
}

/// Reads a document; blank lines are skipped.
pub fn read_jsonl(input: impl BufRead) -> Result<Vec<Event>, FormatError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: Record = serde_json::from_str(&line).map_err(|source| FormatError::Json { line: i + 1, source })?;
        out.push(
            record
                .into_event()
                .map_err(|detail| FormatError::Record { line: i + 1, detail })?,
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<Event> {
        let a = EventId(0xabc);
        let b = EventId(0xdef);
        let base = |id, kind: &str, value| Event {
            id,
            base: None,
            kind: kind.into(),
            value,
            actor: "engine".into(),
            cause: vec![],
            model: None,
            timestamp: 7,
        };
        vec![
            base(a, "Individual", Value::Text("John Doe".into())),
            Event {
                base: Some(a),
                cause: vec![a],
                model: Some(a),
                ..base(b, "location", Value::Ref(a))
            },
            base(EventId(1), "warmth", Value::Number(20.5)),
            base(EventId(2), "hasFire", Value::Null),
            base(EventId(3), "Exclude", Value::Retract(b)),
        ]
    }

    #[test]
    fn round_trip() {
        let events = sample();
        let text = to_jsonl(&events);
        assert_eq!(text.lines().count(), events.len());
        assert_eq!(read_jsonl(text.as_bytes()).unwrap(), events);
    }

    #[test]
    fn field_names() {
        let text = to_jsonl(&sample()[1..2]);
        let v: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(keys, ["actor", "base", "cause", "id", "model", "ts", "type", "value"]);
        assert_eq!(v["value"]["ref"], "00000000000000000000000000000abc");
    }

    #[test]
    fn bad_records_name_the_line() {
        let err = read_jsonl("\n{\"id\":\"zz\"}\n".as_bytes()).unwrap_err();
        assert!(err.to_string().starts_with("line 2"));
        let mut line = to_jsonl(&sample()[..1]);
        line = line.replace("\"John Doe\"", "{\"pointer\":\"1\"}");
        assert!(matches!(read_jsonl(line.as_bytes()), Err(FormatError::Record { line: 1, .. })));
    }
}
