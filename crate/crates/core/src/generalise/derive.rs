//! Goal types read off concrete proof states.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::kernel::ProofState;
use crate::lattice::{
    ClassRef, Datum, Feature, FeatureData, GoalClass, GoalType, LatticeError, Link, LinkKey,
};
use crate::term::{shared_leaf_positions, Op, Symbol, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeriveError {
    #[error("hypotheses `{0}` and `{1}` get the same role with overlapping classes")]
    OverlappingRoles(String, String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

pub fn derive_class(label: &str, e: &Term) -> GoalClass {
    let top = Feature::TopSymbol.data([[Datum::Symbol(e.top_symbol())]]);
    let ops = Feature::HasSymbol.data([e
        .operator_symbols()
        .into_iter()
        .map(|o| Datum::Symbol(Symbol::Op(o)))]);
    GoalClass::top(label)
        .with(Feature::TopSymbol, top)
        .with(Feature::HasSymbol, ops)
}

fn role_of(e: &Term) -> &'static str {
    if e.top_symbol() == Symbol::Op(Op::Pure) {
        "P"
    } else {
        "H"
    }
}

/// Role label of each hypothesis: `P` for `pure(..)` facts, `H` otherwise;
/// later members of a role get `H2`, `H3`, ...
pub fn fact_roles(hyps: &BTreeMap<String, Term>) -> Result<BTreeMap<String, String>, DeriveError> {
    let mut groups: BTreeMap<&str, Vec<(&String, GoalClass)>> = BTreeMap::new();
    for (name, e) in hyps {
        groups.entry(role_of(e)).or_default().push((name, derive_class("_", e)));
    }
    let mut out = BTreeMap::new();
    for (role, mut members) in groups {
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                if !members[i].1.orthogonal(&members[j].1) {
                    return Err(DeriveError::OverlappingRoles(members[i].0.clone(), members[j].0.clone()));
                }
            }
        }
        members.sort_by(|a, b| a.1.to_string().cmp(&b.1.to_string()).then(a.0.cmp(b.0)));
        for (i, (name, _)) in members.into_iter().enumerate() {
            let label = if i == 0 { role.to_string() } else { format!("{role}{}", i + 1) };
            out.insert(name.clone(), label);
        }
    }
    Ok(out)
}

/// `[[p]]` for the leftmost leaf position where both terms carry the same
/// atom, `[[bot]]` when there is none.
pub fn derive_symb_at_pos(e1: &Term, e2: &Term) -> FeatureData {
    let witness = match shared_leaf_positions(e1, e2).into_iter().next() {
        Some(p) => Datum::Position(p),
        None => Datum::Bottom,
    };
    Feature::SymbAtPos.data([[witness]])
}

pub fn derive_is_match(e1: &Term, e2: &Term) -> FeatureData {
    Feature::IsMatch.data([[Datum::Bool(e1 == e2)]])
}

pub fn derive_goal_type(ps: &ProofState) -> Result<GoalType, DeriveError> {
    let roles = fact_roles(&ps.hyps)?;
    let mut facts = Vec::new();
    let mut elems: Vec<(ClassRef, &Term)> = vec![(ClassRef::Concl, &ps.concl)];
    for (name, label) in &roles {
        let e = &ps.hyps[name];
        facts.push(derive_class(label, e));
        elems.push((ClassRef::Fact(label.clone()), e));
    }
    let mut link = Link::new();
    for (r1, e1) in &elems {
        for (r2, e2) in &elems {
            if r1 == r2 {
                continue;
            }
            link.set(LinkKey::new(Feature::SymbAtPos, r1.clone(), r2.clone()), derive_symb_at_pos(e1, e2));
            link.set(LinkKey::new(Feature::IsMatch, r1.clone(), r2.clone()), derive_is_match(e1, e2));
        }
    }
    prune_links(&mut link);
    Ok(GoalType::new(derive_class("concl", &ps.concl), facts, link)?)
}

/// Keeps only links from the conclusion to a fact.
pub fn prune_links(link: &mut Link) {
    link.retain(|k| k.left == ClassRef::Concl && matches!(k.right, ClassRef::Fact(_)));
}
