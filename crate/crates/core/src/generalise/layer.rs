//! Finding repeated segments and folding a segment into a graph tactic.

use std::collections::BTreeSet;

use thiserror::Error;

use super::pushout::SegmentMatch;
use crate::graph::{Endpoint, GraphTactic, NodeId, StrategyGraph, StrategyNode, Wire, WireId};
use crate::kernel::TacticArg;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayerError {
    #[error("segment is empty")]
    Empty,
    #[error("segment {0} wires are not pairwise orthogonal")]
    NotOrthogonal(&'static str),
    #[error("segment wire {0} has no concrete label")]
    VariableLabel(WireId),
}

fn region(g: &StrategyGraph, head: NodeId, cut: Option<WireId>) -> BTreeSet<NodeId> {
    let mut seen = BTreeSet::from([head]);
    let mut stack = vec![head];
    while let Some(n) = stack.pop() {
        for w in g.out_wires(n) {
            if Some(w) == cut {
                continue;
            }
            if let Some(d) = g.wire(w).unwrap().dst.node() {
                if seen.insert(d) {
                    stack.push(d);
                }
            }
        }
    }
    seen
}

fn crossing(g: &StrategyGraph, s: &BTreeSet<NodeId>) -> (Vec<WireId>, Vec<WireId>) {
    let inside = |e: Endpoint| e.node().is_some_and(|n| s.contains(&n));
    let entries = g.wires().filter(|(_, w)| inside(w.dst) && !inside(w.src)).map(|(id, _)| id).collect();
    let exits = g.wires().filter(|(_, w)| inside(w.src) && !inside(w.dst)).map(|(id, _)| id).collect();
    (entries, exits)
}

#[derive(Debug, PartialEq, Eq)]
enum Skel {
    Node(String, Vec<(usize, Skel)>),
    Hole,
    Back,
    Exit,
}

fn skeleton(g: &StrategyGraph, s: &BTreeSet<NodeId>, n: NodeId, hole: WireId, seen: &mut BTreeSet<NodeId>) -> Skel {
    seen.insert(n);
    let mut outs: Vec<(usize, WireId)> = g
        .out_wires(n)
        .into_iter()
        .map(|w| match g.wire(w).unwrap().src {
            Endpoint::Port(_, p) => (p, w),
            Endpoint::Boundary => (0, w),
        })
        .collect();
    outs.sort();
    let children = outs
        .into_iter()
        .map(|(p, w)| {
            let child = if w == hole {
                Skel::Hole
            } else {
                match g.wire(w).unwrap().dst.node() {
                    Some(d) if s.contains(&d) && seen.contains(&d) => Skel::Back,
                    Some(d) if s.contains(&d) => skeleton(g, s, d, hole, seen),
                    _ => Skel::Exit,
                }
            };
            (p, child)
        })
        .collect();
    Skel::Node(g.node(n).unwrap().short_label(), children)
}

fn single_entry(g: &StrategyGraph, s: &BTreeSet<NodeId>, entry: WireId) -> bool {
    crossing(g, s).0 == [entry]
}

/// The largest pair of adjacent, disjoint segments with the same tactic
/// skeleton, each of at least two nodes, entered by one wire and left by one
/// wire; the second starts where the first is left.
pub fn find_repeated_segments(g: &StrategyGraph) -> Option<SegmentMatch> {
    let mut best: Option<(usize, SegmentMatch)> = None;
    for h1 in g.preorder() {
        let [in1] = g.in_wires(h1)[..] else { continue };
        let reach = region(g, h1, None);
        for &n in &reach {
            for cut in g.out_wires(n) {
                let Some(h2) = g.wire(cut).unwrap().dst.node() else { continue };
                let s1 = region(g, h1, Some(cut));
                if s1.len() < 2 || s1.contains(&h2) || !single_entry(g, &s1, in1) || crossing(g, &s1).1 != [cut] {
                    continue;
                }
                if best.as_ref().is_some_and(|(size, _)| *size >= s1.len()) {
                    continue;
                }
                let sk1 = skeleton(g, &s1, h1, cut, &mut BTreeSet::new());
                let reach2 = region(g, h2, None);
                let mut found = None;
                'second: for &m in &reach2 {
                    for cut2 in g.out_wires(m) {
                        let s2 = region(g, h2, Some(cut2));
                        if s2.len() != s1.len() || !s2.is_disjoint(&s1) || !single_entry(g, &s2, cut) {
                            continue;
                        }
                        if crossing(g, &s2).1 != [cut2] {
                            continue;
                        }
                        if skeleton(g, &s2, h2, cut2, &mut BTreeSet::new()) == sk1 {
                            found = Some(s2);
                            break 'second;
                        }
                    }
                }
                if let Some(s2) = found {
                    let pairs = correspond(g, h1, &s1, h2, &s2);
                    best = Some((s1.len(), SegmentMatch { pairs }));
                }
            }
        }
    }
    best.map(|(_, m)| m)
}

/// Pairs nodes of two segments with equal skeletons by walking them together.
fn correspond(
    g: &StrategyGraph,
    h1: NodeId,
    s1: &BTreeSet<NodeId>,
    h2: NodeId,
    s2: &BTreeSet<NodeId>,
) -> std::collections::BTreeMap<NodeId, NodeId> {
    let mut pairs = std::collections::BTreeMap::new();
    let mut stack = vec![(h1, h2)];
    while let Some((a, b)) = stack.pop() {
        if pairs.insert(a, b).is_some() {
            continue;
        }
        let ports = |n: NodeId, s: &BTreeSet<NodeId>| -> Vec<(usize, NodeId)> {
            let mut v: Vec<(usize, NodeId)> = g
                .out_wires(n)
                .into_iter()
                .filter_map(|w| {
                    let wire = g.wire(w).unwrap();
                    match (wire.src, wire.dst.node()) {
                        (Endpoint::Port(_, p), Some(d)) if s.contains(&d) => Some((p, d)),
                        _ => None,
                    }
                })
                .collect();
            v.sort();
            v
        };
        for ((_, x), (_, y)) in ports(a, s1).into_iter().zip(ports(b, s2)) {
            if !pairs.contains_key(&x) {
                stack.push((x, y));
            }
        }
    }
    pairs
}

/// Name stem for a segment headed by `head`.
pub fn segment_name(g: &StrategyGraph, head: NodeId) -> String {
    match g.node(head) {
        Some(StrategyNode::Atomic(t)) => match &t.arg {
            TacticArg::Names(ns) => format!("p{}", ns.iter().cloned().collect::<Vec<_>>().join("_")),
            TacticArg::Class(l) => format!("p{}", l.replace('|', "_")),
        },
        Some(StrategyNode::Graph(gt)) => format!("p{}", gt.name),
        _ => "seg".to_string(),
    }
}

/// Replaces `segment` by a graph tactic whose body is the segment itself.
pub fn layer(g: &StrategyGraph, segment: &BTreeSet<NodeId>, name: &str) -> Result<(StrategyGraph, NodeId), LayerError> {
    if segment.is_empty() {
        return Err(LayerError::Empty);
    }
    let (entries, exits) = crossing(g, segment);
    for (what, ws) in [("input", &entries), ("output", &exits)] {
        let labels = ws
            .iter()
            .map(|w| g.wire(*w).unwrap().label.goal_type().ok_or(LayerError::VariableLabel(*w)))
            .collect::<Result<Vec<_>, _>>()?;
        for i in 0..labels.len() {
            for j in i + 1..labels.len() {
                if !labels[i].orthogonal(labels[j]) {
                    return Err(LayerError::NotOrthogonal(what));
                }
            }
        }
    }
    let mut body = StrategyGraph::new();
    for &n in segment {
        body.insert_node(n, g.node(n).unwrap().clone());
    }
    let mut out = g.clone();
    for (id, w) in g.wires() {
        let src_in = w.src.node().is_some_and(|n| segment.contains(&n));
        let dst_in = w.dst.node().is_some_and(|n| segment.contains(&n));
        match (src_in, dst_in) {
            (true, true) => {
                body.insert_wire(id, w.clone());
                out.remove_wire(id);
            }
            (false, true) => body.insert_wire(
                id,
                Wire {
                    src: Endpoint::Boundary,
                    ..w.clone()
                },
            ),
            (true, false) => body.insert_wire(
                id,
                Wire {
                    dst: Endpoint::Boundary,
                    ..w.clone()
                },
            ),
            (false, false) => {}
        }
    }
    body.set_boundary(entries.clone(), exits.clone());
    for &n in segment {
        out.remove_node(n);
    }
    let gt = out.add_node(StrategyNode::Graph(GraphTactic {
        name: name.to_string(),
        children: vec![body],
    }));
    for (i, w) in entries.iter().enumerate() {
        out.wire_mut(*w).unwrap().dst = Endpoint::Port(gt, i);
    }
    for (j, w) in exits.iter().enumerate() {
        out.wire_mut(*w).unwrap().src = Endpoint::Port(gt, j);
    }
    Ok((out, gt))
}
