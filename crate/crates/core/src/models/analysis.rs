//! Load-time analysis: model dependency graph, expression type safety and
//! per-term reachability.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::report::{codes, Diagnostic};
use super::{ModelProperty, ModelSpec, Registry, ANY_INDIVIDUAL};
use crate::bsl::{BinOp, ContextVar, DataType, Expr, Literal, PropertyKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DependencyKind {
    Condition,
    SetValue,
}

impl DependencyKind {
    pub fn name(self) -> &'static str {
        match self {
            DependencyKind::Condition => "Condition",
            DependencyKind::SetValue => "SetValue",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DepNode {
    pub model: String,
    pub property: String,
}

impl DepNode {
    fn new(model: &str, property: &str) -> Self {
        DepNode {
            model: String::from(model),
            property: String::from(property),
        }
    }
}

/// `from` can produce a value of `property` that `to` reads.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DepEdge {
    pub from: DepNode,
    pub to: DepNode,
    pub property: String,
    /// Relation navigated to reach `property`, if any.
    pub via: Option<String>,
    pub kind: DependencyKind,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DependencyGraph {
    pub nodes: Vec<DepNode>,
    pub edges: Vec<DepEdge>,
}

impl DependencyGraph {
    pub fn in_edges<'a>(&'a self, to: &'a DepNode) -> impl Iterator<Item = &'a DepEdge> + 'a {
        self.edges.iter().filter(move |e| &e.to == to)
    }

    pub fn has_edge(&self, from: (&str, &str), to: (&str, &str)) -> bool {
        self.edges.iter().any(|e| {
            e.from.model == from.0
                && e.from.property == from.1
                && e.to.model == to.0
                && e.to.property == to.1
        })
    }
}

/// One property read by an expression.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Reference {
    pub property: String,
    pub via: Option<String>,
}

/// Property reads of `expr`, deduplicated, in first-occurrence order. A
/// navigation `$($.r).p` reads both `r` and `p` via `r`.
pub fn expression_references(expr: &Expr) -> Vec<Reference> {
    let mut out: Vec<Reference> = Vec::new();
    let mut push = |r: Reference| {
        if !out.contains(&r) {
            out.push(r);
        }
    };
    expr.walk(&mut |e| match e {
        Expr::Prop(p) => push(Reference {
            property: p.clone(),
            via: None,
        }),
        Expr::Deref { relation, property } => {
            push(Reference {
                property: relation.clone(),
                via: None,
            });
            push(Reference {
                property: property.clone(),
                via: Some(relation.clone()),
            });
        }
        _ => {}
    });
    out
}

fn restrictions(p: &ModelProperty) -> impl Iterator<Item = (DependencyKind, &Expr)> {
    p.condition
        .iter()
        .map(|e| (DependencyKind::Condition, e))
        .chain(p.set_value.iter().map(|e| (DependencyKind::SetValue, e)))
}

fn concepts_match(a: &str, b: &str) -> bool {
    a == ANY_INDIVIDUAL || b == ANY_INDIVIDUAL || a == b
}

impl Registry {
    fn range_of(&self, relation: &str) -> &str {
        self.property(relation)
            .and_then(|p| p.range.as_deref())
            .unwrap_or(ANY_INDIVIDUAL)
    }

    /// Concept of the individual a `SetDo` target expression names.
    fn setdo_target_concept<'a>(&'a self, model: &'a ModelSpec, target: &Expr) -> &'a str {
        match target {
            Expr::Var(ContextVar::CurrentIndividual) => &model.concept,
            Expr::Prop(r) => self.range_of(r),
            _ => ANY_INDIVIDUAL,
        }
    }

    /// Nodes that can emit `property` on individuals of `concept`.
    fn producers(&self, concept: &str, property: &str) -> BTreeSet<DepNode> {
        let mut out = BTreeSet::new();
        for m in self.models_of(concept) {
            if m.property(property).is_some() {
                out.insert(DepNode::new(&m.name, property));
            }
        }
        for m in &self.models {
            for p in &m.properties {
                for action in &p.set_do {
                    let assigns = action.assignments.iter().any(|(k, _)| k == property);
                    if assigns && concepts_match(self.setdo_target_concept(m, &action.target), concept) {
                        out.insert(DepNode::new(&m.name, &p.name));
                    }
                }
            }
        }
        out
    }
}

pub(super) fn build_dependency_graph(registry: &Registry) -> DependencyGraph {
    let mut nodes = Vec::new();
    let mut edges = BTreeSet::new();
    for m in registry.models() {
        for p in &m.properties {
            nodes.push(DepNode::new(&m.name, &p.name));
        }
    }
    for m in registry.models() {
        for p in &m.properties {
            let to = DepNode::new(&m.name, &p.name);
            for (kind, expr) in restrictions(p) {
                for r in expression_references(expr) {
                    let concept = match &r.via {
                        None => m.concept.as_str(),
                        Some(rel) => registry.range_of(rel),
                    };
                    for from in registry.producers(concept, &r.property) {
                        edges.insert(DepEdge {
                            from,
                            to: to.clone(),
                            property: r.property.clone(),
                            via: r.via.clone(),
                            kind,
                        });
                    }
                }
            }
        }
    }
    DependencyGraph {
        nodes,
        edges: edges.into_iter().collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ty {
    Number,
    Text,
    Individual,
    Unknown,
}

struct TypeChecker<'a> {
    registry: &'a Registry,
    model: &'a ModelSpec,
    location: String,
    out: Vec<Diagnostic>,
}

impl TypeChecker<'_> {
    fn error(&mut self, code: &'static str, message: String) {
        let d = Diagnostic::new(code, self.location.clone(), message);
        if !self.out.contains(&d) {
            self.out.push(d);
        }
    }

    fn spec_type(&self, name: &str) -> Ty {
        match self.registry.property(name) {
            Some(p) if p.kind == PropertyKind::Relation => Ty::Individual,
            Some(p) => match p.data_type {
                Some(DataType::String) => Ty::Text,
                Some(_) => Ty::Number,
                None => Ty::Unknown,
            },
            None => Ty::Unknown,
        }
    }

    /// `$.name` must be a property of the enclosing model.
    fn own_property(&mut self, name: &str) -> Ty {
        if self.model.property(name).is_some() {
            return self.spec_type(name);
        }
        if self.registry.property(name).is_some() {
            self.error(
                codes::TYPE,
                format!("`{name}` is not a property of `{}`", self.model.name),
            );
        } else {
            self.error(codes::UNKNOWN_PROP, format!("`{name}` is not a declared property"));
        }
        Ty::Unknown
    }

    fn expr(&mut self, e: &Expr) -> Ty {
        match e {
            Expr::Literal(Literal::Number(_)) => Ty::Number,
            Expr::Literal(Literal::Text(_)) => Ty::Text,
            Expr::Var(ContextVar::Value) => Ty::Unknown,
            Expr::Var(ContextVar::CurrentIndividual) => Ty::Individual,
            Expr::Prop(p) => self.own_property(p),
            Expr::Deref { relation, property } => {
                match self.own_property(relation) {
                    Ty::Individual | Ty::Unknown => {}
                    _ => {
                        self.error(codes::TYPE, format!("`{relation}` is not a relation"));
                        return Ty::Unknown;
                    }
                }
                let range = self.registry.range_of(relation);
                if self.registry.property(property).is_none() {
                    self.error(codes::UNKNOWN_PROP, format!("`{property}` is not a declared property"));
                    return Ty::Unknown;
                }
                if !self.registry.models_of(range).any(|m| m.property(property).is_some()) {
                    self.error(
                        codes::TYPE,
                        format!("`{relation}` leads to {range}, and no {range} model has `{property}`"),
                    );
                    return Ty::Unknown;
                }
                self.spec_type(property)
            }
            Expr::NumCoerce(inner) => {
                if self.expr(inner) == Ty::Individual {
                    self.error(codes::TYPE, format!("cannot coerce relation value `{}` to a number", describe(inner)));
                }
                Ty::Number
            }
            Expr::Binary { op, lhs, rhs } => {
                let l = self.expr(lhs);
                let r = self.expr(rhs);
                let mismatch = match op {
                    BinOp::And | BinOp::Or | BinOp::StrictEq => false,
                    BinOp::Eq => matches!(
                        (l, r),
                        (Ty::Individual, Ty::Number) | (Ty::Number, Ty::Individual)
                    ),
                    BinOp::Lt | BinOp::Gt | BinOp::Ge => l == Ty::Individual || r == Ty::Individual,
                };
                if mismatch {
                    self.error(
                        codes::TYPE,
                        format!("`{}` compares incompatible operands", op.symbol()),
                    );
                }
                Ty::Number
            }
        }
    }
}

fn describe(e: &Expr) -> String {
    crate::bsl::print_expression(e)
}

/// Type-checks the top-level restrictions of one model.
pub(super) fn check_model_types(registry: &Registry, model: &ModelSpec) -> Vec<Diagnostic> {
    let mut checker = TypeChecker {
        registry,
        model,
        location: String::new(),
        out: Vec::new(),
    };
    for p in &model.properties {
        for (kind, expr) in restrictions(p) {
            checker.location = format!("{}/{}/{}", model.name, p.name, kind.name());
            checker.expr(expr);
        }
        for action in &p.set_do {
            checker.location = format!("{}/{}/SetDo", model.name, p.name);
            checker.expr(&action.guard);
            if checker.expr(&action.target) != Ty::Individual {
                checker.error(
                    codes::TYPE,
                    format!("target `{}` is not an individual", describe(&action.target)),
                );
                continue;
            }
            let concept = registry.setdo_target_concept(model, &action.target);
            for (key, _) in &action.assignments {
                let known = match &action.target {
                    Expr::Var(ContextVar::CurrentIndividual) => model.property(key).is_some(),
                    _ => registry.models_of(concept).any(|m| m.property(key).is_some()),
                };
                if !known && registry.property(key).is_some() {
                    checker.error(
                        codes::TYPE,
                        format!("no {concept} model has `{key}` to assign"),
                    );
                }
            }
        }
        // Nested restrictions are checked against the model's own properties.
        fn nested(checker: &mut TypeChecker<'_>, list: &[ModelProperty]) {
            for n in list {
                for (kind, expr) in restrictions(n) {
                    checker.location = format!("{}/{}/{}", checker.model.name, n.name, kind.name());
                    checker.expr(expr);
                }
                nested(checker, &n.nested);
            }
        }
        nested(&mut checker, &p.nested);
    }
    checker.out
}

/// Properties some rule, default or individual can give a value.
fn producible(registry: &Registry) -> BTreeSet<&str> {
    let mut out = BTreeSet::new();
    for m in registry.models() {
        for p in &m.properties {
            if p.set_value.is_some() || p.default.is_some() {
                out.insert(p.name.as_str());
            }
            for action in &p.set_do {
                for (k, _) in &action.assignments {
                    out.insert(k.as_str());
                }
            }
        }
    }
    for ind in registry.individuals() {
        for p in &ind.initialized {
            out.insert(p.as_str());
        }
    }
    out
}

/// Warns for every condition term that reads a property nothing produces.
pub(super) fn check_reachability(registry: &Registry, models: &[&ModelSpec]) -> Vec<Diagnostic> {
    let produced = producible(registry);
    let mut out = Vec::new();
    for m in models {
        for p in &m.properties {
            for (kind, expr) in restrictions(p) {
                for r in expression_references(expr) {
                    if !produced.contains(r.property.as_str()) {
                        out.push(Diagnostic::new(
                            codes::UNREACHABLE,
                            format!("{}/{}/{}", m.name, p.name, kind.name()),
                            format!(
                                "requires `{}`, but no SetValue, SetDo, Default or individual produces it",
                                r.property
                            ),
                        ));
                    }
                }
            }
        }
    }
    out
}
