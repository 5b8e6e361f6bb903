use std::collections::BTreeSet;

use super::derive::{derive_goal_type, fact_roles, DeriveError};
use crate::graph::{Endpoint, StrategyGraph, StrategyNode, WireLabel};
use crate::kernel::{ProofTrace, TacticApp, TacticArg, TacticKind, TraceNode};

/// Rule arguments naming hypotheses become references to their role class.
fn abstract_tactic(node: &TraceNode) -> Result<TacticApp, DeriveError> {
    let tac = &node.tactic;
    let (TacticKind::Rule, TacticArg::Names(names)) = (&tac.kind, &tac.arg) else {
        return Ok(tac.clone());
    };
    let roles = fact_roles(&node.state.hyps)?;
    if !names.iter().all(|n| roles.contains_key(n)) {
        return Ok(tac.clone());
    }
    let labels: BTreeSet<&str> = names.iter().map(|n| roles[n].as_str()).collect();
    Ok(TacticApp::rule_class(&labels.into_iter().collect::<Vec<_>>().join("|")))
}

/// The tree-shaped strategy that replays `trace`; every wire carries the
/// derived type of the state that travels on it.
pub fn trace_to_graph(trace: &ProofTrace) -> Result<StrategyGraph, DeriveError> {
    fn go(g: &mut StrategyGraph, node: &TraceNode, src: Endpoint) -> Result<(), DeriveError> {
        let id = g.add_node(StrategyNode::Atomic(abstract_tactic(node)?));
        let label = WireLabel::Concrete(derive_goal_type(&node.state)?);
        g.add_wire(src, Endpoint::Port(id, 0), label);
        for (i, child) in node.children.iter().enumerate() {
            go(g, child, Endpoint::Port(id, i))?;
        }
        Ok(())
    }
    let mut g = StrategyGraph::new();
    go(&mut g, &trace.root, Endpoint::Boundary)?;
    Ok(g)
}
