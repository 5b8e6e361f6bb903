//! The generalisation schedule: loops first, then layering and fusion of
//! repeated segments, until nothing applies.

use std::collections::BTreeSet;

use super::derive::DeriveError;
use super::layer::{find_repeated_segments, layer, segment_name};
use super::loops::{apply_loop1, apply_loop2};
use super::tactics::gen_tactic;
use super::trace_graph::trace_to_graph;
use crate::graph::{NodeId, StrategyGraph};
use crate::kernel::ProofTrace;

/// Upper bound on rewriting steps; each step shrinks the graph or folds a
/// segment, so this is never reached on real traces.
const MAX_STEPS: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub rule: &'static str,
    pub graph: StrategyGraph,
}

/// Layers the two matched segments and fuses the resulting graph tactics.
fn fold_segments(g: &StrategyGraph) -> Option<(StrategyGraph, StrategyGraph)> {
    let m = find_repeated_segments(g)?;
    let first: BTreeSet<NodeId> = m.pairs.keys().copied().collect();
    let second: BTreeSet<NodeId> = m.pairs.values().copied().collect();
    let head = g.preorder().into_iter().find(|n| first.contains(n))?;
    let stem = segment_name(g, head);
    let (g1, n1) = layer(g, &first, &format!("{stem}a")).ok()?;
    let (layered, n2) = layer(&g1, &second, &format!("{stem}b")).ok()?;
    let fused = gen_tactic(layered.node(n1)?, layered.node(n2)?)?;
    let mut pushed = layered.clone();
    *pushed.node_mut(n1)? = fused.clone();
    *pushed.node_mut(n2)? = fused;
    Some((layered, pushed))
}

/// Applies the schedule to `g`, recording a snapshot after every step.
pub fn generalise_graph(mut g: StrategyGraph) -> Vec<Snapshot> {
    let mut out = Vec::new();
    for _ in 0..MAX_STEPS {
        if let Some(next) = apply_loop1(&g) {
            g = next;
            out.push(Snapshot { rule: "loop1", graph: g.clone() });
        } else if let Some(next) = apply_loop2(&g) {
            g = next;
            out.push(Snapshot { rule: "loop2", graph: g.clone() });
        } else if let Some((layered, pushed)) = fold_segments(&g) {
            out.push(Snapshot { rule: "layer", graph: layered });
            g = pushed;
            out.push(Snapshot { rule: "pushout", graph: g.clone() });
        } else {
            break;
        }
    }
    out
}

/// The trace graph followed by every generalisation step.
pub fn generalise_pipeline(trace: &ProofTrace) -> Result<Vec<Snapshot>, DeriveError> {
    let g = trace_to_graph(trace)?;
    let mut out = vec![Snapshot { rule: "trace", graph: g.clone() }];
    out.extend(generalise_graph(g));
    Ok(out)
}
