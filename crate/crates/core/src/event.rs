//! Event records, identifiers and scalar values.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

/// 128-bit event identifier, rendered as 32 lowercase hex digits.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId(pub u128);

impl EventId {
    /// The first six hex digits, as shown in event-log views.
    pub fn short(&self) -> String {
        let mut s = alloc::format!("{self}");
        s.truncate(6);
        s
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:032x}", self.0)
    }
}

impl fmt::Debug for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.short())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed event id `{0}`")]
pub struct ParseIdError(pub String);

impl FromStr for EventId {
    type Err = ParseIdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() || s.len() > 32 || !s.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(ParseIdError(s.into()));
        }
        u128::from_str_radix(s, 16)
            .map(EventId)
            .map_err(|_| ParseIdError(s.into()))
    }
}

/// The value carried by an event.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Null,
    Number(f64),
    Text(String),
    /// Reference to another event, usually an individual's initiation event.
    Ref(EventId),
    /// Tombstone removing one value of a multi-valued property.
    Retract(EventId),
}

impl Value {
    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(n) => Some(*n),
            Value::Text(s) => s.trim().parse().ok(),
            _ => None,
        }
    }

    pub fn as_ref_id(&self) -> Option<EventId> {
        match self {
            Value::Ref(id) => Some(*id),
            _ => None,
        }
    }

    pub fn bool(b: bool) -> Value {
        Value::Number(if b { 1.0 } else { 0.0 })
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => f.write_str("null"),
            Value::Number(n) => f.write_str(&format_number(*n)),
            Value::Text(s) => f.write_str(s),
            Value::Ref(id) => write!(f, "@{}", id.short()),
            Value::Retract(id) => write!(f, "retract @{}", id.short()),
        }
    }
}

/// Canonical text of a number: integral values print without a fraction.
pub fn format_number(n: f64) -> String {
    if n.is_finite() && n.abs() < 1e15 && n == (n as i64) as f64 {
        alloc::format!("{}", n as i64)
    } else {
        alloc::format!("{n}")
    }
}

/// One immutable record of world history.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub id: EventId,
    /// The entity or property initiation event this event refers to.
    pub base: Option<EventId>,
    /// Property name, or a schema keyword such as `Individual` or `Model`.
    pub kind: String,
    pub value: Value,
    pub actor: String,
    pub cause: Vec<EventId>,
    pub model: Option<EventId>,
    /// Wall-clock milliseconds. Informational only.
    pub timestamp: u64,
}

/// An event before the graph assigns its id and timestamp.
#[derive(Debug, Clone, PartialEq)]
pub struct EventDraft {
    pub base: Option<EventId>,
    pub kind: String,
    pub value: Value,
    pub actor: String,
    pub cause: Vec<EventId>,
    pub model: Option<EventId>,
}

impl EventDraft {
    pub fn new(kind: impl Into<String>, value: Value) -> Self {
        EventDraft {
            base: None,
            kind: kind.into(),
            value,
            actor: String::from(crate::engine::ENGINE_ACTOR),
            cause: Vec::new(),
            model: None,
        }
    }

    pub fn base(mut self, base: EventId) -> Self {
        self.base = Some(base);
        self
    }

    pub fn actor(mut self, actor: impl Into<String>) -> Self {
        self.actor = actor.into();
        self
    }

    pub fn cause(mut self, cause: Vec<EventId>) -> Self {
        self.cause = cause;
        self
    }

    pub fn model(mut self, model: Option<EventId>) -> Self {
        self.model = model;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn id_hex_round_trip() {
        let id = EventId(0x00ab_cdef_0123_4567_89ab_cdef_0123_4567);
        let text = alloc::format!("{id}");
        assert_eq!(text.len(), 32);
        assert_eq!(text, text.to_lowercase());
        assert_eq!(text.parse::<EventId>().unwrap(), id);
        assert_eq!(id.short(), "00abcd");
        assert!("xyz".parse::<EventId>().is_err());
    }

    #[test]
    fn canonical_numbers() {
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(70.0), "70");
        assert_eq!(format_number(2.5), "2.5");
    }
}
