use std::collections::BTreeMap;
use std::fmt;

use super::feature::{Datum, Feature, FeatureData, TOP};
use crate::term::{Symbol, Term};

/// A labelled goal class. Features that are absent are `Top`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GoalClass {
    pub label: String,
    features: BTreeMap<Feature, FeatureData>,
}

pub fn merge_labels(a: &str, b: &str) -> String {
    if a == b {
        return a.to_string();
    }
    let mut parts: Vec<&str> = a.split('|').chain(b.split('|')).collect();
    parts.sort_unstable();
    parts.dedup();
    parts.join("|")
}

impl GoalClass {
    pub fn top(label: &str) -> Self {
        GoalClass {
            label: label.to_string(),
            features: BTreeMap::new(),
        }
    }

    pub fn with(mut self, f: Feature, d: FeatureData) -> Self {
        self.set(f, d);
        self
    }

    pub fn set(&mut self, f: Feature, d: FeatureData) {
        debug_assert!(!f.is_link(), "{} is a link feature", f.name());
        if d.is_top() {
            self.features.remove(&f);
        } else {
            self.features.insert(f, d);
        }
    }

    pub fn get(&self, f: Feature) -> &FeatureData {
        self.features.get(&f).unwrap_or(&TOP)
    }

    pub fn features(&self) -> impl Iterator<Item = (Feature, &FeatureData)> {
        self.features.iter().map(|(f, d)| (*f, d))
    }

    pub fn relabel(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    fn combine(&self, other: &GoalClass, op: impl Fn(Feature, &FeatureData, &FeatureData) -> FeatureData) -> GoalClass {
        let mut out = GoalClass::top(&merge_labels(&self.label, &other.label));
        for f in Feature::CLASS {
            out.set(f, op(f, self.get(f), other.get(f)));
        }
        out
    }

    pub fn meet(&self, other: &GoalClass) -> GoalClass {
        self.combine(other, |f, x, y| f.meet(x, y))
    }

    pub fn join(&self, other: &GoalClass) -> GoalClass {
        self.combine(other, |f, x, y| f.join(x, y))
    }

    pub fn same_features(&self, other: &GoalClass) -> bool {
        self.features == other.features
    }

    pub fn orthogonal(&self, other: &GoalClass) -> bool {
        Feature::CLASS.iter().any(|&f| f.orthogonal(self.get(f), other.get(f)))
    }

    pub fn subtype(&self, other: &GoalClass) -> bool {
        Feature::CLASS.iter().all(|&f| f.subtype(self.get(f), other.get(f)))
    }

    pub fn matches(&self, e: &Term) -> bool {
        Feature::CLASS.iter().all(|&f| match_class_feature(f, self.get(f), e))
    }
}

pub fn match_class_feature(f: Feature, d: &FeatureData, e: &Term) -> bool {
    match f {
        Feature::TopSymbol => {
            let top = e.top_symbol();
            d.eval(|a| matches!(a, Datum::Symbol(s) if *s == top))
        }
        Feature::HasSymbol => {
            let ops = e.operator_symbols();
            d.eval(|a| match a {
                Datum::Bottom => ops.is_empty(),
                Datum::Symbol(Symbol::Op(op)) => ops.contains(op),
                _ => false,
            })
        }
        Feature::IsMatch | Feature::SymbAtPos => false,
    }
}

impl fmt::Display for GoalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .features
            .iter()
            .map(|(k, d)| format!("{}: {d}", k.name()))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}
