use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::models::{expression_references, DependencyKind, Registry};

/// A restriction that must be re-evaluated when a property changes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subscription {
    pub model: String,
    pub dependent: String,
    pub kind: DependencyKind,
    /// Relation through which the property is read, for `$($.r).p`.
    pub via: Option<String>,
}

/// Property name → restrictions reading it, in registration order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SubscriptionIndex {
    by_property: BTreeMap<String, Vec<Subscription>>,
}

impl SubscriptionIndex {
    /// Scans every top-level `Condition` and `SetValue` of every model.
    pub fn build(registry: &Registry) -> Self {
        let mut by_property: BTreeMap<String, Vec<Subscription>> = BTreeMap::new();
        for model in registry.models() {
            for p in &model.properties {
                let restrictions = p
                    .condition
                    .iter()
                    .map(|e| (DependencyKind::Condition, e))
                    .chain(p.set_value.iter().map(|e| (DependencyKind::SetValue, e)));
                for (kind, expr) in restrictions {
                    for r in expression_references(expr) {
                        let sub = Subscription {
                            model: model.name.clone(),
                            dependent: p.name.clone(),
                            kind,
                            via: r.via,
                        };
                        let list = by_property.entry(r.property).or_default();
                        if !list.contains(&sub) {
                            list.push(sub);
                        }
                    }
                }
            }
        }
        SubscriptionIndex { by_property }
    }

    pub fn subscribers(&self, property: &str) -> &[Subscription] {
        self.by_property
            .get(property)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn contains(&self, property: &str) -> bool {
        self.by_property.contains_key(property)
    }

    /// Every `(property, subscription)` pair.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &Subscription)> {
        self.by_property
            .iter()
            .flat_map(|(p, subs)| subs.iter().map(move |s| (p.as_str(), s)))
    }

    pub fn len(&self) -> usize {
        self.by_property.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_property.is_empty()
    }
}
