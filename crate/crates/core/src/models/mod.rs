//! Schema registry: concepts, property declarations, models and the
//! individuals that reify them. Registration validates a whole document
//! and either commits all of it or nothing.

mod analysis;
mod reify;
mod report;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::bsl::{
    DataType, Document, Expr, IndividualDecl, Literal, ModelDecl, PropertyKind, PropertyUse,
    Restriction, SetDoAction, ValueLine,
};

pub use analysis::{
    expression_references, DepEdge, DepNode, DependencyGraph, DependencyKind, Reference,
};
pub use reify::{
    individual_decl, materialize, read_schema, SchemaIds, StoredSchema, CONCEPT_KIND, MODEL_KIND,
    SET_MODEL_KIND,
};
pub use report::{codes, AnalysisReport, Diagnostic, Severity};

/// Relation range that admits an individual of any concept.
pub const ANY_INDIVIDUAL: &str = "Individual";

/// The only view mode this runtime renders.
pub const SHOWCASE: &str = "showcase";

#[derive(Debug, Clone, PartialEq)]
pub struct PropertySpec {
    pub name: String,
    pub kind: PropertyKind,
    pub data_type: Option<DataType>,
    pub range: Option<String>,
}

/// One property slot of a model with its restrictions.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelProperty {
    pub name: String,
    pub kind: PropertyKind,
    pub condition: Option<Expr>,
    pub set_value: Option<Expr>,
    pub set_do: Vec<SetDoAction>,
    pub default: Option<Literal>,
    pub multiple: bool,
    pub required: bool,
    pub nested: Vec<ModelProperty>,
}

impl ModelProperty {
    /// A property with a `Condition` and no `SetValue` is triggered by an actor.
    pub fn is_action(&self) -> bool {
        self.condition.is_some() && self.set_value.is_none()
    }

    pub fn is_derived(&self) -> bool {
        self.set_value.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub name: String,
    pub concept: String,
    pub properties: Vec<ModelProperty>,
    pub decl: ModelDecl,
}

impl ModelSpec {
    pub fn property(&self, name: &str) -> Option<&ModelProperty> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub fn actions(&self) -> impl Iterator<Item = &ModelProperty> {
        self.properties.iter().filter(|p| p.is_action())
    }

    /// Names of properties nested anywhere below the top level.
    pub fn nested_names(&self) -> BTreeSet<&str> {
        fn walk<'a>(list: &'a [ModelProperty], out: &mut BTreeSet<&'a str>) {
            for p in list {
                out.insert(p.name.as_str());
                walk(&p.nested, out);
            }
        }
        let mut out = BTreeSet::new();
        for p in &self.properties {
            walk(&p.nested, &mut out);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndividualInfo {
    pub name: String,
    pub concept: String,
    pub model: String,
    /// Top-level properties given a value at creation, defaults included.
    pub initialized: Vec<String>,
}

/// A validated value of an individual about to be created.
#[derive(Debug, Clone, PartialEq)]
pub struct PlannedValue {
    pub property: String,
    pub value: PlannedScalar,
    pub nested: Vec<PlannedValue>,
    /// Filled in from the model's `Default`.
    pub defaulted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlannedScalar {
    Number(f64),
    Text(String),
    /// Reference to the named individual.
    Individual(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndividualPlan {
    pub name: String,
    pub concept: String,
    pub model: String,
    pub values: Vec<PlannedValue>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub property: String,
    /// Diagnostic code of the broken rule.
    pub rule: &'static str,
    pub detail: String,
}

impl Violation {
    fn new(property: &str, rule: &'static str, detail: impl Into<String>) -> Self {
        Violation {
            property: String::from(property),
            rule,
            detail: detail.into(),
        }
    }
}

/// What one successful registration added.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Registration {
    pub concepts: Vec<String>,
    pub properties: Vec<String>,
    pub models: Vec<String>,
    pub individuals: Vec<IndividualPlan>,
    pub warnings: Vec<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Registry {
    concepts: Vec<String>,
    properties: Vec<PropertySpec>,
    property_index: BTreeMap<String, usize>,
    models: Vec<ModelSpec>,
    model_index: BTreeMap<String, usize>,
    individuals: Vec<IndividualInfo>,
    individual_index: BTreeMap<String, usize>,
}

impl Registry {
    pub fn new() -> Self {
        Registry::default()
    }

    pub fn concepts(&self) -> &[String] {
        &self.concepts
    }

    pub fn has_concept(&self, name: &str) -> bool {
        self.concepts.iter().any(|c| c == name)
    }

    pub fn properties(&self) -> &[PropertySpec] {
        &self.properties
    }

    pub fn property(&self, name: &str) -> Option<&PropertySpec> {
        self.property_index.get(name).map(|&i| &self.properties[i])
    }

    pub fn models(&self) -> &[ModelSpec] {
        &self.models
    }

    pub fn model(&self, name: &str) -> Option<&ModelSpec> {
        self.model_index.get(name).map(|&i| &self.models[i])
    }

    /// Models describing `concept`; every model for [`ANY_INDIVIDUAL`].
    pub fn models_of<'a>(&'a self, concept: &'a str) -> impl Iterator<Item = &'a ModelSpec> + 'a {
        self.models
            .iter()
            .filter(move |m| concept == ANY_INDIVIDUAL || m.concept == concept)
    }

    pub fn individuals(&self) -> &[IndividualInfo] {
        &self.individuals
    }

    pub fn individual(&self, name: &str) -> Option<&IndividualInfo> {
        self.individual_index.get(name).map(|&i| &self.individuals[i])
    }

    /// Model of the named individual.
    pub fn model_of(&self, individual: &str) -> Option<&ModelSpec> {
        self.individual(individual).and_then(|i| self.model(&i.model))
    }

    /// Records an individual that already exists in a graph.
    pub fn adopt_individual(&mut self, info: IndividualInfo) {
        self.individual_index
            .insert(info.name.clone(), self.individuals.len());
        self.individuals.push(info);
    }

    /// Validates `doc` against the current contents and, when no errors are
    /// found, commits it. Earlier registrations are never modified.
    pub fn register(&mut self, doc: &Document) -> Result<Registration, AnalysisReport> {
        let mut staged = self.clone();
        let mut report = AnalysisReport::default();
        let mut out = Registration::default();

        for c in doc.concepts() {
            if staged.has_concept(&c.name) {
                report.error(Diagnostic::new(
                    codes::DUPLICATE,
                    &c.name,
                    format!("concept `{}` is already declared", c.name),
                ));
            } else {
                staged.concepts.push(c.name.clone());
                out.concepts.push(c.name.clone());
            }
        }

        for p in doc.properties() {
            if staged.property(&p.name).is_some() {
                report.error(Diagnostic::new(
                    codes::DUPLICATE,
                    &p.name,
                    format!("property `{}` is already declared", p.name),
                ));
                continue;
            }
            match p.kind {
                PropertyKind::Attribute if p.data_type.is_none() => report.error(Diagnostic::new(
                    codes::TYPE,
                    &p.name,
                    "attribute has no DataType",
                )),
                PropertyKind::Relation => match &p.range {
                    None => report.error(Diagnostic::new(codes::TYPE, &p.name, "relation has no Range")),
                    Some(r) if r != ANY_INDIVIDUAL && !staged.has_concept(r) => {
                        report.error(Diagnostic::new(
                            codes::UNKNOWN_CONCEPT,
                            &p.name,
                            format!("range `{r}` is not a declared concept"),
                        ))
                    }
                    _ => {}
                },
                _ => {}
            }
            staged
                .property_index
                .insert(p.name.clone(), staged.properties.len());
            staged.properties.push(PropertySpec {
                name: p.name.clone(),
                kind: p.kind,
                data_type: p.data_type,
                range: p.range.clone(),
            });
            out.properties.push(p.name.clone());
        }

        for m in doc.models() {
            if !staged.has_concept(&m.concept) {
                report.error(Diagnostic::new(
                    codes::UNKNOWN_CONCEPT,
                    &m.name,
                    format!("model describes undeclared concept `{}`", m.concept),
                ));
            }
            if staged.model(&m.name).is_some() {
                report.error(Diagnostic::new(
                    codes::DUPLICATE,
                    &m.name,
                    format!("model `{}` is already registered", m.name),
                ));
                continue;
            }
            let spec = staged.build_model(m, &mut report);
            staged.model_index.insert(m.name.clone(), staged.models.len());
            staged.models.push(spec);
            out.models.push(m.name.clone());
        }

        let mut pending = Vec::new();
        for ind in doc.individuals() {
            let location = ind.name.as_str();
            if staged.individual(&ind.name).is_some() {
                report.error(Diagnostic::new(
                    codes::DUPLICATE,
                    location,
                    format!("individual `{}` already exists", ind.name),
                ));
                continue;
            }
            if !staged.has_concept(&ind.concept) {
                report.error(Diagnostic::new(
                    codes::UNKNOWN_CONCEPT,
                    location,
                    format!("individual of undeclared concept `{}`", ind.concept),
                ));
            }
            let model = match &ind.model {
                None => {
                    report.error(Diagnostic::new(codes::UNKNOWN_MODEL, location, "no SetModel line"));
                    continue;
                }
                Some(m) => m.clone(),
            };
            staged.adopt_individual(IndividualInfo {
                name: ind.name.clone(),
                concept: ind.concept.clone(),
                model,
                initialized: Vec::new(),
            });
            pending.push(ind);
        }

        for name in &out.models {
            if let Some(model) = staged.model(name) {
                report.errors.extend(analysis::check_model_types(&staged, model));
            }
        }

        let mut plans = Vec::new();
        for ind in pending {
            match staged.validate_reification(ind) {
                Ok(plan) => plans.push(plan),
                Err(violations) => {
                    for v in violations {
                        report.error(Diagnostic::new(
                            v.rule,
                            format!("{}/{}", ind.name, v.property),
                            v.detail,
                        ));
                    }
                }
            }
        }
        for plan in &plans {
            let idx = staged.individual_index[&plan.name];
            staged.individuals[idx].initialized = plan.values.iter().map(|v| v.property.clone()).collect();
        }

        let new_models: Vec<&ModelSpec> = out
            .models
            .iter()
            .filter_map(|name| staged.model(name))
            .collect();
        let reachability = analysis::check_reachability(&staged, &new_models);
        report.warnings.extend(reachability);

        if !report.is_ok() {
            return Err(report);
        }
        out.individuals = plans;
        out.warnings = report.warnings;
        *self = staged;
        Ok(out)
    }

    fn build_model(&self, decl: &ModelDecl, report: &mut AnalysisReport) -> ModelSpec {
        let mut seen = BTreeSet::new();
        let mut properties = Vec::new();
        for use_ in &decl.properties {
            if !seen.insert(use_.property.as_str()) {
                report.error(Diagnostic::new(
                    codes::DUPLICATE,
                    format!("{}/{}", decl.name, use_.property),
                    "property used twice in one model",
                ));
                continue;
            }
            properties.push(self.build_property(&decl.name, use_, report));
        }
        ModelSpec {
            name: decl.name.clone(),
            concept: decl.concept.clone(),
            properties,
            decl: decl.clone(),
        }
    }

    fn build_property(&self, model: &str, use_: &PropertyUse, report: &mut AnalysisReport) -> ModelProperty {
        let location = format!("{model}/{}", use_.property);
        let spec = self.property(&use_.property);
        match spec {
            None => report.error(Diagnostic::new(
                codes::UNKNOWN_PROP,
                &location,
                format!("`{}` is not a declared property", use_.property),
            )),
            Some(s) if s.kind != use_.kind => report.error(Diagnostic::new(
                codes::TYPE,
                &location,
                format!(
                    "`{}` is declared as {}, used as {}",
                    use_.property,
                    s.kind.keyword(),
                    use_.kind.keyword()
                ),
            )),
            _ => {}
        }
        let mut prop = ModelProperty {
            name: use_.property.clone(),
            kind: use_.kind,
            condition: None,
            set_value: None,
            set_do: Vec::new(),
            default: None,
            multiple: false,
            required: false,
            nested: Vec::new(),
        };
        for r in &use_.restrictions {
            let here = format!("{location}/{}", r.keyword());
            let twice = |report: &mut AnalysisReport| {
                report.error(Diagnostic::new(codes::DUPLICATE, &here, "restriction given twice"))
            };
            match r {
                Restriction::Condition(e) => match prop.condition {
                    Some(_) => twice(report),
                    None => prop.condition = Some(e.clone()),
                },
                Restriction::SetValue(e) => match prop.set_value {
                    Some(_) => twice(report),
                    None => prop.set_value = Some(e.clone()),
                },
                Restriction::SetDo(actions) => {
                    for action in actions {
                        for (key, lit) in &action.assignments {
                            match self.property(key) {
                                None => report.error(Diagnostic::new(
                                    codes::UNKNOWN_PROP,
                                    &here,
                                    format!("SetDo assigns undeclared property `{key}`"),
                                )),
                                Some(target) => {
                                    if let Err(msg) = literal_fits(target, lit) {
                                        report.error(Diagnostic::new(codes::TYPE, &here, msg));
                                    }
                                }
                            }
                        }
                    }
                    prop.set_do.extend(actions.iter().cloned());
                }
                Restriction::Default(lit) => {
                    if let Some(s) = spec {
                        if let Err(msg) = literal_fits(s, lit) {
                            report.error(Diagnostic::new(codes::TYPE, &here, msg));
                        }
                    }
                    match prop.default {
                        Some(_) => twice(report),
                        None => prop.default = Some(lit.clone()),
                    }
                }
                Restriction::Multiple(b) => prop.multiple = *b,
                Restriction::Required(b) => prop.required = *b,
                Restriction::Unsupported { kind, .. } => report.warn(Diagnostic::new(
                    codes::UNSUPPORTED,
                    &here,
                    format!("restriction `{kind}` is recognized but not enforced"),
                )),
            }
        }
        prop.nested = use_
            .nested
            .iter()
            .map(|n| self.build_property(model, n, report))
            .collect();
        prop
    }

    /// Checks an individual declaration against its model and the property
    /// declarations, producing the values to write (defaults included).
    pub fn validate_reification(&self, draft: &IndividualDecl) -> Result<IndividualPlan, Vec<Violation>> {
        let mut violations = Vec::new();
        let model_name = draft.model.clone().unwrap_or_default();
        let Some(model) = self.model(&model_name) else {
            return Err(alloc::vec![Violation::new(
                "SetModel",
                codes::UNKNOWN_MODEL,
                format!("model `{model_name}` is not registered"),
            )]);
        };
        if model.concept != draft.concept {
            violations.push(Violation::new(
                "SetModel",
                codes::UNKNOWN_MODEL,
                format!(
                    "model `{}` describes `{}`, not `{}`",
                    model.name, model.concept, draft.concept
                ),
            ));
        }

        let tree = match nest_values(&draft.values) {
            Ok(tree) => tree,
            Err(v) => return Err(alloc::vec![v]),
        };
        let nested_allowed = model.nested_names();
        let mut values = Vec::new();
        let mut given = BTreeSet::new();
        for node in &tree {
            let Some(mp) = model.property(&node.line.property) else {
                violations.push(Violation::new(
                    &node.line.property,
                    codes::UNKNOWN_PROP,
                    format!("`{}` is not a property of `{}`", node.line.property, model.name),
                ));
                continue;
            };
            if !given.insert(mp.name.as_str()) && !mp.multiple {
                violations.push(Violation::new(
                    &mp.name,
                    codes::DUPLICATE,
                    "single-valued property given more than once",
                ));
                continue;
            }
            if let Some(v) = self.plan_value(node, &nested_allowed, &mut violations) {
                values.push(v);
            }
        }

        for mp in &model.properties {
            if given.contains(mp.name.as_str()) {
                continue;
            }
            match (&mp.default, self.property(&mp.name)) {
                (Some(lit), Some(spec)) => {
                    let text = match lit {
                        Literal::Number(n) => crate::event::format_number(*n),
                        Literal::Text(s) => s.clone(),
                    };
                    match self.convert(spec, &text) {
                        Ok(value) => values.push(PlannedValue {
                            property: mp.name.clone(),
                            value,
                            nested: Vec::new(),
                            defaulted: true,
                        }),
                        Err(v) => violations.push(v),
                    }
                }
                _ if mp.required => violations.push(Violation::new(
                    &mp.name,
                    codes::REQUIRED,
                    "required property has no value and no Default",
                )),
                _ => {}
            }
        }

        if violations.is_empty() {
            Ok(IndividualPlan {
                name: draft.name.clone(),
                concept: draft.concept.clone(),
                model: model.name.clone(),
                values,
            })
        } else {
            Err(violations)
        }
    }

    fn plan_value(
        &self,
        node: &ValueNode<'_>,
        nested_allowed: &BTreeSet<&str>,
        violations: &mut Vec<Violation>,
    ) -> Option<PlannedValue> {
        let name = node.line.property.as_str();
        let Some(spec) = self.property(name) else {
            violations.push(Violation::new(name, codes::UNKNOWN_PROP, "undeclared property"));
            return None;
        };
        if name == "ViewMode" && node.line.value != SHOWCASE {
            violations.push(Violation::new(
                name,
                codes::VIEW_MODE,
                format!("view mode `{}` is not supported", node.line.value),
            ));
        }
        let value = match self.convert(spec, &node.line.value) {
            Ok(v) => v,
            Err(v) => {
                violations.push(v);
                return None;
            }
        };
        let mut nested = Vec::new();
        for child in &node.children {
            if !nested_allowed.contains(child.line.property.as_str()) {
                violations.push(Violation::new(
                    &child.line.property,
                    codes::UNKNOWN_PROP,
                    "not a nested property of the model",
                ));
                continue;
            }
            if let Some(v) = self.plan_value(child, nested_allowed, violations) {
                nested.push(v);
            }
        }
        Some(PlannedValue {
            property: String::from(name),
            value,
            nested,
            defaulted: false,
        })
    }

    fn convert(&self, spec: &PropertySpec, text: &str) -> Result<PlannedScalar, Violation> {
        let bad = |detail: String| Violation::new(&spec.name, codes::TYPE, detail);
        match spec.kind {
            PropertyKind::Attribute => match spec.data_type.unwrap_or(DataType::String) {
                DataType::String => Ok(PlannedScalar::Text(String::from(text))),
                DataType::Numeric => match text.trim().parse::<f64>() {
                    Ok(n) if n.is_finite() => Ok(PlannedScalar::Number(n)),
                    _ => Err(bad(format!("`{text}` is not Numeric"))),
                },
                DataType::Boolean => match text.trim().parse::<f64>() {
                    Ok(n) if n == 0.0 || n == 1.0 => Ok(PlannedScalar::Number(n)),
                    _ => Err(bad(format!("`{text}` is not Boolean (0 or 1)"))),
                },
            },
            PropertyKind::Relation => {
                let Some(target) = self.individual(text) else {
                    return Err(Violation::new(
                        &spec.name,
                        codes::UNKNOWN_INDIVIDUAL,
                        format!("`{text}` is not an individual"),
                    ));
                };
                let range = spec.range.as_deref().unwrap_or(ANY_INDIVIDUAL);
                if range != ANY_INDIVIDUAL && target.concept != range {
                    return Err(Violation::new(
                        &spec.name,
                        codes::RANGE,
                        format!("`{text}` is a {}, range is {range}", target.concept),
                    ));
                }
                Ok(PlannedScalar::Individual(String::from(text)))
            }
        }
    }

    /// Full static analysis of everything registered.
    pub fn analyze(&self) -> AnalysisReport {
        let mut report = AnalysisReport::default();
        let all: Vec<&ModelSpec> = self.models.iter().collect();
        for model in &all {
            report.errors.extend(analysis::check_model_types(self, model));
        }
        report.warnings.extend(analysis::check_reachability(self, &all));
        report
    }

    pub fn check_type_safety(&self) -> Vec<Diagnostic> {
        self.models
            .iter()
            .flat_map(|m| analysis::check_model_types(self, m))
            .collect()
    }

    pub fn check_reachability(&self) -> Vec<Diagnostic> {
        let all: Vec<&ModelSpec> = self.models.iter().collect();
        analysis::check_reachability(self, &all)
    }

    pub fn dependency_graph(&self) -> DependencyGraph {
        analysis::build_dependency_graph(self)
    }
}

/// Whether a literal may be stored in a property.
fn literal_fits(spec: &PropertySpec, lit: &Literal) -> Result<(), String> {
    match (spec.kind, spec.data_type, lit) {
        (PropertyKind::Relation, _, Literal::Text(_)) => Ok(()),
        (PropertyKind::Relation, _, Literal::Number(n)) => Err(format!(
            "relation `{}` cannot hold the number {n}",
            spec.name
        )),
        (_, Some(DataType::Boolean), Literal::Number(n)) if *n == 0.0 || *n == 1.0 => Ok(()),
        (_, Some(DataType::Numeric), Literal::Number(_)) => Ok(()),
        (_, Some(DataType::String) | None, _) => Ok(()),
        (_, Some(dt), lit) => Err(format!(
            "{lit:?} does not fit `{}` of type {}",
            spec.name,
            dt.name()
        )),
    }
}

struct ValueNode<'a> {
    line: &'a ValueLine,
    children: Vec<ValueNode<'a>>,
}

/// Builds the value tree of an individual. A line with `n` colons belongs to
/// the latest entry placed at depth `n - 1`; when that entry has the same
/// property, the line becomes its sibling instead.
fn nest_values(lines: &[ValueLine]) -> Result<Vec<ValueNode<'_>>, Violation> {
    struct Flat {
        parent: Option<usize>,
    }
    let mut flat: Vec<Flat> = Vec::new();
    let mut last_at: Vec<usize> = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        let depth = usize::from(line.depth.max(1));
        let mut effective = depth;
        let mut parent = None;
        if depth > 1 {
            let Some(&p) = last_at.get(depth - 2) else {
                return Err(Violation::new(
                    &line.property,
                    codes::UNKNOWN_PROP,
                    format!("value line nested {depth} deep has no parent"),
                ));
            };
            if lines[p].property == line.property {
                effective = depth - 1;
                parent = flat[p].parent;
            } else {
                parent = Some(p);
            }
        }
        flat.push(Flat { parent });
        last_at.truncate(effective - 1);
        last_at.push(i);
    }

    fn build<'a>(lines: &'a [ValueLine], flat: &[Flat], parent: Option<usize>) -> Vec<ValueNode<'a>> {
        (0..lines.len())
            .filter(|&i| flat[i].parent == parent)
            .map(|i| ValueNode {
                line: &lines[i],
                children: build(lines, flat, Some(i)),
            })
            .collect()
    }
    Ok(build(lines, &flat, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bsl::parse_document;
    use crate::scenarios::WINTER_FEAST;

    fn with_view_schema() -> Registry {
        let mut r = Registry::new();
        r.register(&parse_document(crate::scenarios::VIEW_GENESIS).unwrap())
            .unwrap();
        r
    }

    fn feast_registry() -> Registry {
        let mut r = with_view_schema();
        r.register(&parse_document(WINTER_FEAST).unwrap()).unwrap();
        r
    }

    #[test]
    fn bundled_world_registers_cleanly() {
        let mut r = with_view_schema();
        let reg = r.register(&parse_document(WINTER_FEAST).unwrap()).unwrap();
        assert!(reg.warnings.is_empty(), "{:?}", reg.warnings);
        let domain: Vec<_> = r.models().iter().filter(|m| !m.decl.is_view()).collect();
        assert_eq!(domain.len(), 2);
        assert_eq!(reg.individuals.len(), 4);
        let john = reg.individuals.iter().find(|p| p.name == "John Doe").unwrap();
        assert!(john.values.iter().all(|v| !v.defaulted));
    }

    #[test]
    fn undeclared_attribute_is_reported() {
        let mut r = feast_registry();
        let doc = parse_document("Survivor: Model: Tired\n: Attribute: stamina\n").unwrap();
        let report = r.register(&doc).unwrap_err();
        assert_eq!(report.count(codes::UNKNOWN_PROP), 1);
        assert!(r.model("Tired").is_none());
    }

    #[test]
    fn additive_registration_keeps_prior_content() {
        let mut r = feast_registry();
        let before = r.clone();
        let reg = r
            .register(&parse_document("Survivor: Model: Model Scout\n: Attribute: energy\n").unwrap())
            .unwrap();
        assert_eq!(reg.models, alloc::vec![String::from("Model Scout")]);
        for m in before.models() {
            assert_eq!(r.model(&m.name), Some(m));
        }
        let dup = r.register(&parse_document("Survivor: Model: Model Scout\n: Attribute: energy\n").unwrap());
        assert_eq!(dup.unwrap_err().count(codes::DUPLICATE), 1);
    }

    fn draft(src: &str) -> IndividualDecl {
        parse_document(src).unwrap().individuals().next().unwrap().clone()
    }

    #[test]
    fn reification_checks_range_and_defaults() {
        let r = feast_registry();
        let bad = draft("Survivor: Individual: Jane\n: SetModel: Model Survivor\n: location: John Doe\n");
        let violations = r.validate_reification(&bad).unwrap_err();
        assert_eq!(violations[0].rule, codes::RANGE);

        let ok = draft("Survivor: Individual: Jane\n: SetModel: Model Survivor\n: energy: 40\n");
        let plan = r.validate_reification(&ok).unwrap();
        let min = plan.values.iter().find(|v| v.property == "energyMin").unwrap();
        assert!(min.defaulted);
        assert_eq!(min.value, PlannedScalar::Number(30.0));

        let typed = draft("Survivor: Individual: Jane\n: SetModel: Model Survivor\n: hasWood: 2\n");
        assert_eq!(r.validate_reification(&typed).unwrap_err()[0].rule, codes::TYPE);
        let unknown = draft("Survivor: Individual: Jane\n: SetModel: Model Survivor\n: hasTree: 1\n");
        assert_eq!(r.validate_reification(&unknown).unwrap_err()[0].rule, codes::UNKNOWN_PROP);
    }

    #[test]
    fn view_values_nest_with_lifted_controls() {
        let r = feast_registry();
        let doc = parse_document(WINTER_FEAST).unwrap();
        let view = doc.individuals().find(|i| i.name == "View Survivor").unwrap();
        let plan = r.validate_reification(view).unwrap();
        let concept = plan.values.iter().find(|v| v.property == "ViewConcept").unwrap();
        let controls: Vec<_> = concept.nested.iter().filter(|v| v.property == "Control").collect();
        assert_eq!(controls.len(), 5);
        for c in controls {
            let kids: Vec<_> = c.nested.iter().map(|v| v.property.as_str()).collect();
            assert_eq!(kids, ["Title", "ControlType", "Value"]);
        }
        let bad_mode = draft(
            "View: Individual: V\n: SetModel: Model View Individual\n: ViewConcept: Survivor\n:: ViewMode: carousel\n",
        );
        assert_eq!(r.validate_reification(&bad_mode).unwrap_err()[0].rule, codes::VIEW_MODE);
    }

    #[test]
    fn required_without_default_is_a_violation() {
        let mut r = feast_registry();
        r.register(
            &parse_document("Survivor: Model: Strict\n: Attribute: energy\n:: Required: 1\n").unwrap(),
        )
        .unwrap();
        let d = draft("Survivor: Individual: Jane\n: SetModel: Strict\n");
        assert_eq!(r.validate_reification(&d).unwrap_err()[0].rule, codes::REQUIRED);
    }
}
