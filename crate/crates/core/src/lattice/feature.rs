use std::collections::BTreeSet;
use std::fmt;

use crate::term::{Position, Symbol, Term};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Datum {
    /// Absence witness; excludes every other datum in a conjunct.
    Bottom,
    Bool(bool),
    Int(i64),
    Position(Position),
    Symbol(Symbol),
    Term(Term),
}

impl fmt::Display for Datum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Datum::Bottom => f.write_str("bot"),
            Datum::Bool(b) => write!(f, "{b}"),
            Datum::Int(n) => write!(f, "#{n}"),
            Datum::Position(p) => write!(f, "{p}"),
            Datum::Symbol(s) => write!(f, "{s}"),
            Datum::Term(t) => write!(f, "'{t}'"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Feature {
    TopSymbol,
    HasSymbol,
    IsMatch,
    SymbAtPos,
}

pub type Conjunct = BTreeSet<Datum>;

/// `Top`, or a disjunction of conjuncts kept as a satisfiable antichain.
/// An empty disjunction is the feature's bottom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureData {
    Top,
    Dnf(BTreeSet<Conjunct>),
}

pub static TOP: FeatureData = FeatureData::Top;

impl Feature {
    pub const CLASS: [Feature; 2] = [Feature::TopSymbol, Feature::HasSymbol];
    pub const LINK: [Feature; 2] = [Feature::IsMatch, Feature::SymbAtPos];

    pub fn name(self) -> &'static str {
        match self {
            Feature::TopSymbol => "top_symbol",
            Feature::HasSymbol => "has_symbol",
            Feature::IsMatch => "is_match",
            Feature::SymbAtPos => "symb_at_pos",
        }
    }

    pub fn from_name(s: &str) -> Option<Feature> {
        [Feature::TopSymbol, Feature::HasSymbol, Feature::IsMatch, Feature::SymbAtPos]
            .into_iter()
            .find(|f| f.name() == s)
    }

    pub fn is_link(self) -> bool {
        Feature::LINK.contains(&self)
    }

    /// Whether some element can satisfy every datum of the conjunct.
    pub fn satisfiable(self, conj: &Conjunct) -> bool {
        if conj.contains(&Datum::Bottom) && conj.len() > 1 {
            return false;
        }
        match self {
            // A term has one top symbol; a pair of terms matches or it does not.
            Feature::TopSymbol | Feature::IsMatch => conj.len() <= 1,
            Feature::HasSymbol | Feature::SymbAtPos => true,
        }
    }

    pub fn canonical<I: IntoIterator<Item = Conjunct>>(self, conjs: I) -> FeatureData {
        let mut sat: Vec<Conjunct> = conjs.into_iter().filter(|c| self.satisfiable(c)).collect();
        if sat.iter().any(BTreeSet::is_empty) {
            return FeatureData::Top;
        }
        sat.sort_by_key(BTreeSet::len);
        let mut kept: Vec<Conjunct> = Vec::new();
        for c in sat {
            if !kept.iter().any(|k| k.is_subset(&c)) {
                kept.push(c);
            }
        }
        FeatureData::Dnf(kept.into_iter().collect())
    }

    pub fn data<I, J>(self, lists: I) -> FeatureData
    where
        I: IntoIterator<Item = J>,
        J: IntoIterator<Item = Datum>,
    {
        self.canonical(lists.into_iter().map(|l| l.into_iter().collect()))
    }

    pub fn meet(self, x: &FeatureData, y: &FeatureData) -> FeatureData {
        match (x, y) {
            (FeatureData::Top, d) | (d, FeatureData::Top) => d.clone(),
            (FeatureData::Dnf(a), FeatureData::Dnf(b)) => {
                self.canonical(a.iter().flat_map(|p| b.iter().map(move |q| p.union(q).cloned().collect())))
            }
        }
    }

    pub fn join(self, x: &FeatureData, y: &FeatureData) -> FeatureData {
        match (x, y) {
            (FeatureData::Top, _) | (_, FeatureData::Top) => FeatureData::Top,
            (FeatureData::Dnf(a), FeatureData::Dnf(b)) => self.canonical(a.iter().chain(b).cloned()),
        }
    }

    pub fn orthogonal(self, x: &FeatureData, y: &FeatureData) -> bool {
        self.meet(x, y).is_bottom()
    }

    pub fn subtype(self, x: &FeatureData, y: &FeatureData) -> bool {
        &self.meet(x, y) == x
    }
}

impl FeatureData {
    pub fn bottom() -> Self {
        FeatureData::Dnf(BTreeSet::new())
    }

    pub fn is_top(&self) -> bool {
        matches!(self, FeatureData::Top)
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, FeatureData::Dnf(d) if d.is_empty())
    }

    /// Whether some conjunct has every datum true under `holds`.
    pub fn eval(&self, holds: impl Fn(&Datum) -> bool) -> bool {
        match self {
            FeatureData::Top => true,
            FeatureData::Dnf(d) => d.iter().any(|c| c.iter().all(&holds)),
        }
    }
}

/// Set-of-sets reading of a feature value; `Universe` is the top element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sem {
    Universe,
    Sets(BTreeSet<Conjunct>),
}

pub fn sem(d: &FeatureData) -> Sem {
    match d {
        FeatureData::Top => Sem::Universe,
        FeatureData::Dnf(s) => Sem::Sets(s.clone()),
    }
}

impl fmt::Display for FeatureData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureData::Top => f.write_str("top"),
            FeatureData::Dnf(d) if d.is_empty() => f.write_str("bot"),
            FeatureData::Dnf(d) => {
                let conjs: Vec<String> = d
                    .iter()
                    .map(|c| {
                        let atoms: Vec<String> = c.iter().map(Datum::to_string).collect();
                        format!("[{}]", atoms.join(","))
                    })
                    .collect();
                write!(f, "[{}]", conjs.join(","))
            }
        }
    }
}
