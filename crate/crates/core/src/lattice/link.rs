use std::collections::BTreeMap;
use std::fmt;

use super::feature::{Datum, Feature, FeatureData, TOP};
use crate::term::{shared_leaf_positions, Term};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassRef {
    Concl,
    Fact(String),
}

impl fmt::Display for ClassRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassRef::Concl => f.write_str("concl"),
            ClassRef::Fact(l) => f.write_str(l),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkKey {
    pub feature: Feature,
    pub left: ClassRef,
    pub right: ClassRef,
}

impl LinkKey {
    pub fn new(feature: Feature, left: ClassRef, right: ClassRef) -> Self {
        LinkKey { feature, left, right }
    }
}

impl fmt::Display for LinkKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{})", self.feature.name(), self.left, self.right)
    }
}

/// Link feature data between classes; absent keys are `Top`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Link {
    entries: BTreeMap<LinkKey, FeatureData>,
}

impl Link {
    pub fn new() -> Self {
        Link::default()
    }

    pub fn set(&mut self, key: LinkKey, d: FeatureData) {
        if d.is_top() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, d);
        }
    }

    pub fn with(mut self, key: LinkKey, d: FeatureData) -> Self {
        self.set(key, d);
        self
    }

    pub fn get(&self, key: &LinkKey) -> &FeatureData {
        self.entries.get(key).unwrap_or(&TOP)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&LinkKey, &FeatureData)> {
        self.entries.iter()
    }

    pub fn retain(&mut self, keep: impl Fn(&LinkKey) -> bool) {
        self.entries.retain(|k, _| keep(k));
    }

    fn keys_of<'a>(&'a self, other: &'a Link) -> impl Iterator<Item = &'a LinkKey> {
        let mut keys: Vec<&LinkKey> = self.entries.keys().chain(other.entries.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
    }

    pub fn meet(&self, other: &Link) -> Link {
        let mut out = Link::new();
        for k in self.keys_of(other) {
            out.set(k.clone(), k.feature.meet(self.get(k), other.get(k)));
        }
        out
    }

    pub fn join(&self, other: &Link) -> Link {
        let mut out = Link::new();
        for k in self.keys_of(other) {
            out.set(k.clone(), k.feature.join(self.get(k), other.get(k)));
        }
        out
    }

    pub fn orthogonal(&self, other: &Link) -> bool {
        self.keys_of(other).any(|k| k.feature.orthogonal(self.get(k), other.get(k)))
    }

    pub fn subtype(&self, other: &Link) -> bool {
        self.keys_of(other).all(|k| k.feature.subtype(self.get(k), other.get(k)))
    }
}

pub fn match_link_feature(f: Feature, d: &FeatureData, e1: &Term, e2: &Term) -> bool {
    match f {
        Feature::IsMatch => {
            let same = e1 == e2;
            d.eval(|a| matches!(a, Datum::Bool(b) if *b == same))
        }
        Feature::SymbAtPos => {
            let shared = shared_leaf_positions(e1, e2);
            d.eval(|a| match a {
                Datum::Bottom => shared.is_empty(),
                Datum::Position(p) => shared.contains(p),
                _ => false,
            })
        }
        Feature::TopSymbol | Feature::HasSymbol => false,
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|(k, d)| format!("{k}: {d}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}
