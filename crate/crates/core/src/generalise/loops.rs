//! The two loop-introduction rules.

use super::tactics::gen_tactic;
use crate::graph::{Endpoint, NodeId, StrategyGraph, WireId, WireLabel};
use crate::lattice::GoalType;

/// Entry and exit wire of a non-looped tactic with exactly one of each.
fn straight(g: &StrategyGraph, n: NodeId) -> Option<(WireId, WireId)> {
    if !g.node(n)?.is_tactic() || g.is_looped(n) {
        return None;
    }
    match (g.in_wires(n).as_slice(), g.out_wires(n).as_slice()) {
        ([i], [o]) => Some((*i, *o)),
        _ => None,
    }
}

fn label(g: &StrategyGraph, w: WireId) -> Option<&GoalType> {
    g.wire(w)?.label.goal_type()
}

/// Folds `t -B-> t'` between `A` and `C` into one looped tactic when `B` is
/// orthogonal to `C` and a subtype of `A`.
pub fn apply_loop1(g: &StrategyGraph) -> Option<StrategyGraph> {
    for t in g.preorder() {
        let Some((a_w, b_w)) = straight(g, t) else { continue };
        let Endpoint::Port(t2, _) = g.wire(b_w)?.dst else { continue };
        let Some((b_w2, c_w)) = straight(g, t2) else { continue };
        if b_w2 != b_w || t2 == t {
            continue;
        }
        let (Some(a), Some(b), Some(c)) = (label(g, a_w), label(g, b_w), label(g, c_w)) else { continue };
        let Some(fused) = gen_tactic(g.node(t)?, g.node(t2)?) else { continue };
        if !(b.orthogonal(c) && b.subtype(a)) {
            continue;
        }
        let b = b.clone();
        let Endpoint::Port(_, port) = g.wire(c_w)?.src else { continue };
        let mut out = g.clone();
        out.remove_wire(b_w);
        out.remove_node(t2);
        *out.node_mut(t)? = fused;
        out.wire_mut(c_w)?.src = Endpoint::Port(t, port);
        out.add_wire(Endpoint::Port(t, port), Endpoint::Port(t, 0), WireLabel::Concrete(b));
        return Some(out);
    }
    None
}

/// Absorbs the tactic feeding a loop into it when the widened feedback label
/// stays orthogonal to the exits and below the predecessor's input.
pub fn apply_loop2(g: &StrategyGraph) -> Option<StrategyGraph> {
    for n in g.preorder() {
        let (entries, feedback) = (g.entry_wires(n), g.feedback_wires(n));
        let ([entry], [fb]) = (entries.as_slice(), feedback.as_slice()) else { continue };
        let Endpoint::Port(t, _) = g.wire(*entry)?.src else { continue };
        let Some((a_w, b_w)) = straight(g, t) else { continue };
        if b_w != *entry {
            continue;
        }
        let (Some(a), Some(b_prev), Some(b)) = (label(g, a_w), label(g, b_w), label(g, *fb)) else { continue };
        let Some(fused) = gen_tactic(g.node(t)?, g.node(n)?) else { continue };
        let Ok(widened) = b.gen(b_prev) else { continue };
        let exits = g.exit_wires(n);
        let exits_ok = exits
            .iter()
            .all(|w| label(g, *w).is_some_and(|c| widened.orthogonal(c)));
        if !(exits_ok && widened.subtype(a)) {
            continue;
        }
        let mut out = g.clone();
        out.remove_wire(b_w);
        out.remove_node(t);
        *out.node_mut(n)? = fused;
        out.wire_mut(a_w)?.dst = Endpoint::Port(n, 0);
        out.wire_mut(*fb)?.label = WireLabel::Concrete(widened);
        return Some(out);
    }
    None
}
