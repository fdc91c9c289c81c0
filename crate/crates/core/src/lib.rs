//! Runtime core for executable ontologies.
//!
//! World history is an append-only graph of [`Event`]s linked by causal
//! references. Behavior is not coded: models written in BSL declare
//! `Condition`, `SetValue` and `SetDo` restrictions, and the [`Engine`]
//! re-evaluates only the restrictions that subscribe to a changed property.
//!
//! The crate is `no_std` and needs only `alloc`. IO, wire formats, the HTTP
//! service and the command line live in the `eo` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bsl;
pub mod engine;
pub mod event;
pub mod graph;
pub mod models;
pub mod scenarios;

pub use engine::{
    ActionStatus, CascadeResult, CascadeStatus, Engine, EngineError, EvalContext, EvalError,
};
pub use event::{Event, EventDraft, EventId, Value};
pub use graph::{CausalTrace, Graph, GraphError};
pub use models::{AnalysisReport, Diagnostic, Registry};
