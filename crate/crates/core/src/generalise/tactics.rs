use super::pushout::pushout_gen;
use crate::graph::StrategyNode;
use crate::kernel::{TacticApp, TacticArg};
use crate::lattice::merge_labels;

/// Least general tactic covering both, if the two are of a compatible kind.
pub fn gen_tactic(a: &StrategyNode, b: &StrategyNode) -> Option<StrategyNode> {
    match (a, b) {
        (StrategyNode::Atomic(x), StrategyNode::Atomic(y)) => {
            if x.kind != y.kind {
                return None;
            }
            let arg = match (&x.arg, &y.arg) {
                (TacticArg::Names(p), TacticArg::Names(q)) => TacticArg::Names(p.union(q).cloned().collect()),
                (TacticArg::Class(p), TacticArg::Class(q)) => TacticArg::Class(merge_labels(p, q)),
                _ => return None,
            };
            Some(StrategyNode::Atomic(TacticApp { kind: x.kind, arg }))
        }
        (StrategyNode::Graph(x), StrategyNode::Graph(y)) => pushout_gen(x, y).ok().map(StrategyNode::Graph),
        _ => None,
    }
}
