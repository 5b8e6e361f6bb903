use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::class::GoalClass;
use super::link::{match_link_feature, ClassRef, Link};
use crate::kernel::ProofState;
use crate::term::Term;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("fact class label `{0}` occurs more than once")]
    AmbiguousLabel(String),
    #[error("link entry refers to unknown class `{0}`")]
    DanglingRef(String),
    #[error("fact class may not be labelled `concl`")]
    ReservedLabel,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GoalType {
    pub concl: GoalClass,
    facts: BTreeMap<String, GoalClass>,
    pub link: Link,
}

impl GoalType {
    pub fn new(concl: GoalClass, facts: Vec<GoalClass>, link: Link) -> Result<Self, LatticeError> {
        let mut map = BTreeMap::new();
        for c in facts {
            if c.label == "concl" {
                return Err(LatticeError::ReservedLabel);
            }
            if map.contains_key(&c.label) {
                return Err(LatticeError::AmbiguousLabel(c.label));
            }
            map.insert(c.label.clone(), c);
        }
        for (k, _) in link.entries() {
            for r in [&k.left, &k.right] {
                if let ClassRef::Fact(l) = r {
                    if !map.contains_key(l) {
                        return Err(LatticeError::DanglingRef(l.clone()));
                    }
                }
            }
        }
        Ok(GoalType { concl, facts: map, link })
    }

    /// Goal type with a `Top` conclusion class, no facts and no links.
    pub fn top() -> Self {
        GoalType {
            concl: GoalClass::top("concl"),
            facts: BTreeMap::new(),
            link: Link::new(),
        }
    }

    pub fn facts(&self) -> impl Iterator<Item = &GoalClass> {
        self.facts.values()
    }

    pub fn fact(&self, label: &str) -> Option<&GoalClass> {
        self.facts.get(label)
    }

    pub fn orthogonal(&self, other: &GoalType) -> bool {
        if self.concl.orthogonal(&other.concl) || self.link.orthogonal(&other.link) {
            return true;
        }
        !self.facts.is_empty()
            && !other.facts.is_empty()
            && self.facts().all(|f1| other.facts().all(|f2| f1.orthogonal(f2)))
    }

    pub fn subtype(&self, other: &GoalType) -> bool {
        self.concl.subtype(&other.concl)
            && self.link.subtype(&other.link)
            && (other.facts.is_empty() || self.facts().any(|f1| other.facts().any(|f2| f1.subtype(f2))))
    }

    /// Least general generalisation of two goal types.
    pub fn gen(&self, other: &GoalType) -> Result<GoalType, LatticeError> {
        let a: Vec<GoalClass> = self.facts().cloned().collect();
        let b: Vec<GoalClass> = other.facts().cloned().collect();
        let facts = gen_map(&a, &b)?;
        let labels: BTreeSet<String> = facts.iter().map(|c| c.label.clone()).collect();
        let mut link = self.link.join(&other.link);
        link.retain(|k| {
            [&k.left, &k.right]
                .iter()
                .all(|r| matches!(r, ClassRef::Fact(l) if labels.contains(l)) || **r == ClassRef::Concl)
        });
        GoalType::new(self.concl.join(&other.concl), facts, link)
    }
}

/// Pairs fact classes by label and joins each pair; unpaired classes pass
/// through. A class that is a non-orthogonal subtype of another is dropped.
pub fn gen_map(f1: &[GoalClass], f2: &[GoalClass]) -> Result<Vec<GoalClass>, LatticeError> {
    let index = |fs: &[GoalClass]| -> Result<BTreeMap<String, GoalClass>, LatticeError> {
        let mut m = BTreeMap::new();
        for c in fs {
            if m.insert(c.label.clone(), c.clone()).is_some() {
                return Err(LatticeError::AmbiguousLabel(c.label.clone()));
            }
        }
        Ok(m)
    };
    let (m1, m2) = (index(f1)?, index(f2)?);
    let labels: BTreeSet<&String> = m1.keys().chain(m2.keys()).collect();
    let mut out: Vec<GoalClass> = labels
        .into_iter()
        .map(|l| match (m1.get(l), m2.get(l)) {
            (Some(a), Some(b)) => a.join(b),
            (Some(a), None) | (None, Some(a)) => a.clone(),
            (None, None) => unreachable!(),
        })
        .collect();
    loop {
        let drop = (0..out.len()).find(|&i| {
            (0..out.len()).any(|j| {
                i != j
                    && out[i].subtype(&out[j])
                    && !out[i].orthogonal(&out[j])
                    && (!out[j].subtype(&out[i]) || i > j)
            })
        });
        match drop {
            Some(i) => {
                out.remove(i);
            }
            None => return Ok(out),
        }
    }
}

/// A proof state with the facts each class of its type covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Goal {
    pub fmap: BTreeMap<String, BTreeSet<Term>>,
    pub ps: ProofState,
    pub parent: Option<Arc<Goal>>,
}

impl Goal {
    /// Every fact the goal has classified.
    pub fn fact_range(&self) -> BTreeSet<Term> {
        self.fmap.values().flatten().cloned().collect()
    }

    fn elements(&self, r: &ClassRef) -> Vec<&Term> {
        match r {
            ClassRef::Concl => vec![&self.ps.concl],
            ClassRef::Fact(l) => self.fmap.get(l).map_or_else(Vec::new, |s| s.iter().collect()),
        }
    }
}

pub fn goal_has_type(g: &Goal, ty: &GoalType) -> bool {
    if !ty.concl.matches(&g.ps.concl) {
        return false;
    }
    for c in ty.facts() {
        match g.fmap.get(&c.label) {
            Some(fs) if !fs.is_empty() && fs.iter().all(|e| c.matches(e)) => {}
            _ => return false,
        }
    }
    ty.link.entries().all(|(k, d)| {
        let left = g.elements(&k.left);
        let right = g.elements(&k.right);
        let l = |a: &Term, b: &Term| match_link_feature(k.feature, d, a, b);
        left.iter().all(|a| right.iter().any(|b| l(a, b))) && right.iter().all(|b| left.iter().any(|a| l(a, b)))
            && !left.is_empty()
            && !right.is_empty()
    })
}

impl fmt::Display for GoalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let facts: Vec<String> = self.facts().map(|c| format!("{}: {c}", c.label)).collect();
        write!(
            f,
            "gt {{concl: {}, facts: {{{}}}, link: {}}}",
            self.concl,
            facts.join(", "),
            self.link
        )
    }
}
