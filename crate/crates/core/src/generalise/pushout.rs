//! Fusing two graph tactics along their largest common subgraph.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use super::tactics::gen_tactic;
use crate::graph::{Endpoint, GraphTactic, NodeId, StrategyGraph, WireId, WireLabel};
use crate::lattice::LatticeError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("graph tactic `{0}` has more than one body")]
    MultipleChildren(String),
    #[error("bodies of `{0}` and `{1}` have no common subgraph")]
    NoCommonSubgraph(String, String),
    #[error("bodies of `{0}` and `{1}` have different boundaries")]
    Boundary(String, String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Node correspondence between two graphs (or two parts of one graph).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SegmentMatch {
    pub pairs: BTreeMap<NodeId, NodeId>,
}

impl SegmentMatch {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Port pairs of the wires running from `u` to `v`.
fn edges(g: &StrategyGraph, u: NodeId, v: NodeId) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = g
        .wires()
        .filter_map(|(_, w)| match (w.src, w.dst) {
            (Endpoint::Port(a, p), Endpoint::Port(b, q)) if a == u && b == v => Some((p, q)),
            _ => None,
        })
        .collect();
    out.sort_unstable();
    out
}

fn used_ports(g: &StrategyGraph, n: NodeId) -> (BTreeSet<usize>, BTreeSet<usize>) {
    let ins = g
        .in_wires(n)
        .iter()
        .filter_map(|w| match g.wire(*w).unwrap().dst {
            Endpoint::Port(_, p) => Some(p),
            Endpoint::Boundary => None,
        })
        .collect();
    let outs = g
        .out_wires(n)
        .iter()
        .filter_map(|w| match g.wire(*w).unwrap().src {
            Endpoint::Port(_, p) => Some(p),
            Endpoint::Boundary => None,
        })
        .collect();
    (ins, outs)
}

fn connected(g: &StrategyGraph, nodes: &BTreeSet<NodeId>) -> bool {
    let Some(&start) = nodes.iter().next() else { return true };
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(n) = queue.pop_front() {
        for (_, w) in g.wires() {
            let (Some(a), Some(b)) = (w.src.node(), w.dst.node()) else { continue };
            let other = if a == n { b } else if b == n { a } else { continue };
            if nodes.contains(&other) && seen.insert(other) {
                queue.push_back(other);
            }
        }
    }
    seen.len() == nodes.len()
}

/// Largest connected correspondence between tactic nodes of `a` and `b`
/// that keeps generalisable tactics paired and wiring intact. Ties go to the
/// lexicographically smallest pair list.
pub fn largest_common_subgraph(a: &StrategyGraph, b: &StrategyGraph) -> SegmentMatch {
    let na: Vec<NodeId> = a.nodes().filter(|(_, k)| k.is_tactic()).map(|(id, _)| id).collect();
    let nb: Vec<NodeId> = b.nodes().filter(|(_, k)| k.is_tactic()).map(|(id, _)| id).collect();
    let compatible: BTreeSet<(NodeId, NodeId)> = na
        .iter()
        .flat_map(|&u| nb.iter().map(move |&v| (u, v)))
        .filter(|&(u, v)| {
            used_ports(a, u) == used_ports(b, v) && gen_tactic(a.node(u).unwrap(), b.node(v).unwrap()).is_some()
        })
        .collect();

    struct Search<'s> {
        a: &'s StrategyGraph,
        b: &'s StrategyGraph,
        na: &'s [NodeId],
        nb: &'s [NodeId],
        compatible: &'s BTreeSet<(NodeId, NodeId)>,
        best: Vec<(NodeId, NodeId)>,
    }

    impl Search<'_> {
        fn consistent(&self, cur: &[(NodeId, NodeId)], u: NodeId, v: NodeId) -> bool {
            if edges(self.a, u, u) != edges(self.b, v, v) {
                return false;
            }
            cur.iter().all(|&(x, y)| {
                edges(self.a, u, x) == edges(self.b, v, y) && edges(self.a, x, u) == edges(self.b, y, v)
            })
        }

        fn run(&mut self, i: usize, cur: &mut Vec<(NodeId, NodeId)>, used: &mut BTreeSet<NodeId>) {
            if cur.len() + (self.na.len() - i) < self.best.len() {
                return;
            }
            if i == self.na.len() {
                let nodes: BTreeSet<NodeId> = cur.iter().map(|p| p.0).collect();
                let better = cur.len() > self.best.len() || (cur.len() == self.best.len() && *cur < self.best);
                if better && connected(self.a, &nodes) {
                    self.best = cur.clone();
                }
                return;
            }
            let u = self.na[i];
            for &v in self.nb {
                if used.contains(&v) || !self.compatible.contains(&(u, v)) || !self.consistent(cur, u, v) {
                    continue;
                }
                cur.push((u, v));
                used.insert(v);
                self.run(i + 1, cur, used);
                used.remove(&v);
                cur.pop();
            }
            self.run(i + 1, cur, used);
        }
    }

    let mut s = Search {
        a,
        b,
        na: &na,
        nb: &nb,
        compatible: &compatible,
        best: Vec::new(),
    };
    s.run(0, &mut Vec::new(), &mut BTreeSet::new());
    SegmentMatch {
        pairs: s.best.into_iter().collect(),
    }
}

/// The wire of `other` matching wire `w` of `g` under `m`, if any.
fn counterpart(g: &StrategyGraph, other: &StrategyGraph, m: &BTreeMap<NodeId, NodeId>, w: WireId) -> Option<WireId> {
    let wire = g.wire(w)?;
    let map_end = |e: Endpoint| -> Option<Endpoint> {
        match e {
            Endpoint::Boundary => Some(Endpoint::Boundary),
            Endpoint::Port(n, p) => m.get(&n).map(|n2| Endpoint::Port(*n2, p)),
        }
    };
    let (src, dst) = (map_end(wire.src)?, map_end(wire.dst)?);
    if wire.src == Endpoint::Boundary {
        let i = g.inputs().iter().position(|x| *x == w)?;
        let cand = *other.inputs().get(i)?;
        return (other.wire(cand)?.dst == dst).then_some(cand);
    }
    if wire.dst == Endpoint::Boundary {
        let i = g.outputs().iter().position(|x| *x == w)?;
        let cand = *other.outputs().get(i)?;
        return (other.wire(cand)?.src == src).then_some(cand);
    }
    // Parallel wires pair up in id order.
    let rank = g
        .wires()
        .filter(|(id, x)| x.src == wire.src && x.dst == wire.dst && *id < w)
        .count();
    other
        .wires()
        .filter(|(_, x)| x.src == src && x.dst == dst)
        .map(|(id, _)| id)
        .nth(rank)
}

/// Copy of `g` with matched nodes and wires generalised against `other`.
fn generalised_copy(
    g: &StrategyGraph,
    other: &StrategyGraph,
    m: &BTreeMap<NodeId, NodeId>,
) -> Result<StrategyGraph, GenError> {
    let mut out = g.clone();
    for (&u, &v) in m {
        let fused = gen_tactic(g.node(u).unwrap(), other.node(v).unwrap()).expect("matched nodes generalise");
        *out.node_mut(u).unwrap() = fused;
    }
    let ids: Vec<WireId> = g.wires().map(|(id, _)| id).collect();
    for w in ids {
        let Some(cw) = counterpart(g, other, m, w) else { continue };
        if let (WireLabel::Concrete(x), WireLabel::Concrete(y)) = (&g.wire(w).unwrap().label, &other.wire(cw).unwrap().label) {
            out.wire_mut(w).unwrap().label = WireLabel::Concrete(x.gen(y)?);
        }
    }
    Ok(out)
}

fn fused_name(a: &str, b: &str) -> String {
    if a == b {
        return a.to_string();
    }
    let common: String = a.chars().zip(b.chars()).take_while(|(x, y)| x == y).map(|(x, _)| x).collect();
    if common.is_empty() {
        format!("{a}_{b}")
    } else {
        common
    }
}

pub fn pushout_gen(a: &GraphTactic, b: &GraphTactic) -> Result<GraphTactic, GenError> {
    if a == b {
        return Ok(a.clone());
    }
    let (ba, bb) = match (a.children.as_slice(), b.children.as_slice()) {
        ([x], [y]) => (x, y),
        ([_], _) => return Err(GenError::MultipleChildren(b.name.clone())),
        _ => return Err(GenError::MultipleChildren(a.name.clone())),
    };
    if ba.inputs().len() != bb.inputs().len() || ba.outputs().len() != bb.outputs().len() {
        return Err(GenError::Boundary(a.name.clone(), b.name.clone()));
    }
    let m = largest_common_subgraph(ba, bb);
    if m.is_empty() {
        return Err(GenError::NoCommonSubgraph(a.name.clone(), b.name.clone()));
    }
    let inverse: BTreeMap<NodeId, NodeId> = m.pairs.iter().map(|(x, y)| (*y, *x)).collect();
    let total = m.len() == ba.tactic_count()
        && m.len() == bb.tactic_count()
        && ba.wires().count() == bb.wires().count()
        && ba.wires().all(|(w, _)| counterpart(ba, bb, &m.pairs, w).is_some());
    let fa = generalised_copy(ba, bb, &m.pairs)?;
    let children = if total {
        vec![fa]
    } else {
        vec![fa, generalised_copy(bb, ba, &inverse)?]
    };
    Ok(GraphTactic {
        name: fused_name(&a.name, &b.name),
        children,
    })
}
