//! Expression evaluation against graph state.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::bsl::{BinOp, ContextVar, Expr, Literal};
use crate::event::{format_number, EventId, Value};
use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("cannot coerce `{0}` to a number")]
    Coercion(String),
    #[error("SetDo target `{0}` is not an individual")]
    BadTarget(String),
    #[error("`{property}` is not in the model of `{individual}`")]
    NotInModel { individual: String, property: String },
}

/// Evaluation state for one expression on one individual.
pub struct EvalContext<'g> {
    pub graph: &'g Graph,
    pub current: EventId,
    /// `$Value`.
    pub trigger: Value,
    /// Head events consulted, in read order.
    pub reads: Vec<EventId>,
}

impl<'g> EvalContext<'g> {
    pub fn new(graph: &'g Graph, current: EventId) -> Self {
        EvalContext {
            graph,
            current,
            trigger: Value::Null,
            reads: Vec::new(),
        }
    }

    pub fn with_trigger(mut self, value: Value) -> Self {
        self.trigger = value;
        self
    }

    fn read(&mut self, base: EventId, property: &str) -> Value {
        match self.graph.head(base, property) {
            Some(event) => {
                if !self.reads.contains(&event.id) {
                    self.reads.push(event.id);
                }
                event.value.clone()
            }
            None => Value::Null,
        }
    }

    /// Canonical text: numbers without trailing zeros, references as the
    /// individual's name.
    pub fn canonical(&self, v: &Value) -> String {
        match v {
            Value::Null => String::new(),
            Value::Number(n) => format_number(*n),
            Value::Text(s) => s.clone(),
            Value::Ref(id) | Value::Retract(id) => self
                .graph
                .individual_name(*id)
                .map(String::from)
                .unwrap_or_else(|| alloc::format!("{id}")),
        }
    }
}

pub fn truthy(v: &Value) -> bool {
    match v {
        Value::Null | Value::Retract(_) => false,
        Value::Number(n) => *n != 0.0,
        Value::Text(s) => match s.trim().parse::<f64>() {
            Ok(n) => n != 0.0,
            Err(_) => !s.is_empty(),
        },
        Value::Ref(_) => true,
    }
}

fn numeric(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => Some(*n),
        Value::Text(s) => s.trim().parse().ok(),
        _ => None,
    }
}

pub fn evaluate(expr: &Expr, ctx: &mut EvalContext<'_>) -> Result<Value, EvalError> {
    Ok(match expr {
        Expr::Literal(Literal::Number(n)) => Value::Number(*n),
        Expr::Literal(Literal::Text(s)) => Value::Text(s.clone()),
        Expr::Var(ContextVar::Value) => ctx.trigger.clone(),
        Expr::Var(ContextVar::CurrentIndividual) => Value::Ref(ctx.current),
        Expr::Prop(p) => {
            let current = ctx.current;
            ctx.read(current, p)
        }
        Expr::Deref { relation, property } => {
            let current = ctx.current;
            match ctx.read(current, relation) {
                Value::Ref(target) => ctx.read(target, property),
                _ => Value::Null,
            }
        }
        Expr::NumCoerce(inner) => match evaluate(inner, ctx)? {
            Value::Null => Value::Null,
            Value::Number(n) => Value::Number(n),
            Value::Text(s) => match s.trim().parse::<f64>() {
                Ok(n) => Value::Number(n),
                Err(_) => return Err(EvalError::Coercion(s)),
            },
            other => return Err(EvalError::Coercion(ctx.canonical(&other))),
        },
        Expr::Binary { op, lhs, rhs } => match op {
            BinOp::And => {
                let l = evaluate(lhs, ctx)?;
                Value::bool(truthy(&l) && truthy(&evaluate(rhs, ctx)?))
            }
            BinOp::Or => {
                let l = evaluate(lhs, ctx)?;
                Value::bool(truthy(&l) || truthy(&evaluate(rhs, ctx)?))
            }
            _ => {
                let l = evaluate(lhs, ctx)?;
                let r = evaluate(rhs, ctx)?;
                Value::bool(compare(*op, &l, &r, ctx))
            }
        },
    })
}

fn compare(op: BinOp, l: &Value, r: &Value, ctx: &EvalContext<'_>) -> bool {
    if l.is_null() || r.is_null() {
        return false;
    }
    if op == BinOp::StrictEq {
        return ctx.canonical(l) == ctx.canonical(r);
    }
    let ordering = match (numeric(l), numeric(r)) {
        (Some(a), Some(b)) => a.partial_cmp(&b),
        _ => Some(ctx.canonical(l).cmp(&ctx.canonical(r))),
    };
    match (op, ordering) {
        (_, None) => false,
        (BinOp::Eq, Some(o)) => o == Ordering::Equal,
        (BinOp::Lt, Some(o)) => o == Ordering::Less,
        (BinOp::Gt, Some(o)) => o == Ordering::Greater,
        (BinOp::Ge, Some(o)) => o != Ordering::Less,
        _ => false,
    }
}
