//! Strategy graphs: tactic nodes connected by wires labelled with goal types.

mod dot;
mod eval;
mod lift;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::kernel::{KernelError, TacticApp, Theory};
use crate::lattice::{Goal, GoalType};

pub use dot::to_dot;
pub use eval::{eval_step, evaluate, EvalContext, EvalError, EvalResult, EvalStatus, Successor, TranscriptEntry};
pub use lift::{initial_goal, lift_one, lift_tactic, unlift, LiftError, Partition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WireId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl fmt::Display for WireId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{}", self.0)
    }
}

/// A wire end: a node port, or the graph boundary (input side as a source,
/// output side as a destination).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Endpoint {
    Boundary,
    Port(NodeId, usize),
}

impl Endpoint {
    pub fn node(&self) -> Option<NodeId> {
        match self {
            Endpoint::Boundary => None,
            Endpoint::Port(n, _) => Some(*n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WireLabel {
    Concrete(GoalType),
    Var(String),
}

impl WireLabel {
    pub fn goal_type(&self) -> Option<&GoalType> {
        match self {
            WireLabel::Concrete(g) => Some(g),
            WireLabel::Var(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wire {
    pub src: Endpoint,
    pub dst: Endpoint,
    pub label: WireLabel,
}

/// A named sub-strategy; several children are alternatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphTactic {
    pub name: String,
    pub children: Vec<StrategyGraph>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrategyNode {
    Atomic(TacticApp),
    Graph(GraphTactic),
    /// Goals waiting on a wire during evaluation.
    Goals(Vec<Goal>),
}

impl StrategyNode {
    pub fn is_tactic(&self) -> bool {
        !matches!(self, StrategyNode::Goals(_))
    }

    pub fn short_label(&self) -> String {
        match self {
            StrategyNode::Atomic(t) => t.to_string(),
            StrategyNode::Graph(g) => g.name.clone(),
            StrategyNode::Goals(gs) => format!("{} goal(s)", gs.len()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("wire {0} refers to missing node {1}")]
    MissingNode(WireId, NodeId),
    #[error("wire {0} runs from the input boundary straight to the output boundary")]
    BoundaryToBoundary(WireId),
    #[error("boundary wire {0} is not listed in the graph's inputs or outputs")]
    UnlistedBoundary(WireId),
    #[error("node {node} uses port {port} but has {arity} output(s)")]
    Arity { node: NodeId, port: usize, arity: usize },
    #[error("graph tactic `{0}` has children with different boundaries")]
    ChildBoundaries(String),
    #[error("graph tactic `{0}` has no children")]
    NoChildren(String),
    #[error("wire {0} has a variable label")]
    VariableLabel(WireId),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Input and output labels of a node as seen through its wires.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub input: Option<GoalType>,
    pub outputs: Vec<Option<GoalType>>,
}

#[derive(Debug, Clone, Default)]
pub struct StrategyGraph {
    nodes: BTreeMap<NodeId, StrategyNode>,
    wires: BTreeMap<WireId, Wire>,
    inputs: Vec<WireId>,
    outputs: Vec<WireId>,
    next_node: u32,
    next_wire: u32,
}

impl PartialEq for StrategyGraph {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes
            && self.wires == other.wires
            && self.inputs == other.inputs
            && self.outputs == other.outputs
    }
}

impl Eq for StrategyGraph {}

impl StrategyGraph {
    pub fn new() -> Self {
        StrategyGraph::default()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &StrategyNode)> {
        self.nodes.iter().map(|(k, v)| (*k, v))
    }

    pub fn wires(&self) -> impl Iterator<Item = (WireId, &Wire)> {
        self.wires.iter().map(|(k, v)| (*k, v))
    }

    pub fn node(&self, id: NodeId) -> Option<&StrategyNode> {
        self.nodes.get(&id)
    }

    pub fn node_mut(&mut self, id: NodeId) -> Option<&mut StrategyNode> {
        self.nodes.get_mut(&id)
    }

    pub fn wire(&self, id: WireId) -> Option<&Wire> {
        self.wires.get(&id)
    }

    pub fn wire_mut(&mut self, id: WireId) -> Option<&mut Wire> {
        self.wires.get_mut(&id)
    }

    pub fn inputs(&self) -> &[WireId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[WireId] {
        &self.outputs
    }

    /// Number of tactic nodes (goal nodes excluded).
    pub fn tactic_count(&self) -> usize {
        self.nodes.values().filter(|n| n.is_tactic()).count()
    }

    pub fn add_node(&mut self, node: StrategyNode) -> NodeId {
        let id = NodeId(self.next_node);
        self.next_node += 1;
        self.nodes.insert(id, node);
        id
    }

    /// Inserts a node under a fixed id (used by parsers).
    pub fn insert_node(&mut self, id: NodeId, node: StrategyNode) {
        self.next_node = self.next_node.max(id.0 + 1);
        self.nodes.insert(id, node);
    }

    /// Adds a wire; boundary ends are appended to the inputs/outputs.
    pub fn add_wire(&mut self, src: Endpoint, dst: Endpoint, label: WireLabel) -> WireId {
        let id = WireId(self.next_wire);
        self.insert_wire(id, Wire { src, dst, label });
        if src == Endpoint::Boundary {
            self.inputs.push(id);
        }
        if dst == Endpoint::Boundary {
            self.outputs.push(id);
        }
        id
    }

    /// Inserts a wire under a fixed id without touching the boundary lists.
    pub fn insert_wire(&mut self, id: WireId, wire: Wire) {
        self.next_wire = self.next_wire.max(id.0 + 1);
        self.wires.insert(id, wire);
    }

    pub fn set_boundary(&mut self, inputs: Vec<WireId>, outputs: Vec<WireId>) {
        self.inputs = inputs;
        self.outputs = outputs;
    }

    pub fn remove_node(&mut self, id: NodeId) -> Option<StrategyNode> {
        self.nodes.remove(&id)
    }

    pub fn remove_wire(&mut self, id: WireId) -> Option<Wire> {
        self.inputs.retain(|w| *w != id);
        self.outputs.retain(|w| *w != id);
        self.wires.remove(&id)
    }

    pub fn in_wires(&self, n: NodeId) -> Vec<WireId> {
        self.wires
            .iter()
            .filter(|(_, w)| w.dst.node() == Some(n))
            .map(|(id, _)| *id)
            .collect()
    }

    pub fn out_wires(&self, n: NodeId) -> Vec<WireId> {
        self.wires
            .iter()
            .filter(|(_, w)| w.src.node() == Some(n))
            .map(|(id, _)| *id)
            .collect()
    }

    pub fn out_wires_at(&self, n: NodeId, port: usize) -> Vec<WireId> {
        self.wires
            .iter()
            .filter(|(_, w)| w.src == Endpoint::Port(n, port))
            .map(|(id, _)| *id)
            .collect()
    }

    /// Destination of a wire after passing through any goal nodes.
    pub fn logical_dst(&self, mut w: WireId) -> Endpoint {
        loop {
            let dst = self.wires[&w].dst;
            match dst.node().and_then(|n| self.nodes.get(&n).map(|k| (n, k))) {
                Some((n, StrategyNode::Goals(_))) => match self.out_wires(n).first() {
                    Some(next) => w = *next,
                    None => return dst,
                },
                _ => return dst,
            }
        }
    }

    /// Source of a wire before any goal nodes.
    pub fn logical_src(&self, mut w: WireId) -> Endpoint {
        loop {
            let src = self.wires[&w].src;
            match src.node().and_then(|n| self.nodes.get(&n).map(|k| (n, k))) {
                Some((n, StrategyNode::Goals(_))) => match self.in_wires(n).first() {
                    Some(prev) => w = *prev,
                    None => return src,
                },
                _ => return src,
            }
        }
    }

    /// Wires from `n` back into `n`.
    pub fn feedback_wires(&self, n: NodeId) -> Vec<WireId> {
        self.out_wires(n)
            .into_iter()
            .filter(|w| self.logical_dst(*w).node() == Some(n))
            .collect()
    }

    pub fn is_looped(&self, n: NodeId) -> bool {
        !self.feedback_wires(n).is_empty()
    }

    /// Incoming wires of `n` that are not feedback.
    pub fn entry_wires(&self, n: NodeId) -> Vec<WireId> {
        self.in_wires(n)
            .into_iter()
            .filter(|w| self.logical_src(*w).node() != Some(n))
            .collect()
    }

    /// Outgoing wires of `n` that are not feedback.
    pub fn exit_wires(&self, n: NodeId) -> Vec<WireId> {
        self.out_wires(n)
            .into_iter()
            .filter(|w| self.logical_dst(*w).node() != Some(n))
            .collect()
    }

    /// Number of output ports of a node.
    pub fn output_arity(&self, theory: &Theory, n: NodeId) -> Result<usize, GraphError> {
        match &self.nodes[&n] {
            StrategyNode::Atomic(t) => Ok(theory.arity(t)?),
            StrategyNode::Graph(g) => Ok(g.children.first().map_or(0, |c| c.outputs.len())),
            StrategyNode::Goals(_) => Ok(1),
        }
    }

    pub fn signature(&self, theory: &Theory, n: NodeId) -> Result<Signature, GraphError> {
        let join = |ws: Vec<WireId>| -> Result<Option<GoalType>, GraphError> {
            let mut acc: Option<GoalType> = None;
            for w in ws {
                let g = self.wires[&w].label.goal_type().ok_or(GraphError::VariableLabel(w))?;
                acc = Some(match acc {
                    None => g.clone(),
                    Some(a) => a.gen(g).map_err(|_| GraphError::VariableLabel(w))?,
                });
            }
            Ok(acc)
        };
        let arity = self.output_arity(theory, n)?;
        let input = join(self.in_wires(n))?;
        let outputs = (0..arity)
            .map(|p| join(self.out_wires_at(n, p)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Signature { input, outputs })
    }

    pub fn validate(&self, theory: &Theory) -> Result<(), GraphError> {
        for (id, w) in &self.wires {
            for end in [w.src, w.dst] {
                if let Some(n) = end.node() {
                    if !self.nodes.contains_key(&n) {
                        return Err(GraphError::MissingNode(*id, n));
                    }
                }
            }
            if w.src == Endpoint::Boundary && w.dst == Endpoint::Boundary {
                return Err(GraphError::BoundaryToBoundary(*id));
            }
            if (w.src == Endpoint::Boundary && !self.inputs.contains(id))
                || (w.dst == Endpoint::Boundary && !self.outputs.contains(id))
            {
                return Err(GraphError::UnlistedBoundary(*id));
            }
        }
        for (id, node) in &self.nodes {
            let arity = self.output_arity(theory, *id)?;
            for w in self.out_wires(*id) {
                if let Endpoint::Port(_, p) = self.wires[&w].src {
                    if p >= arity {
                        return Err(GraphError::Arity { node: *id, port: p, arity });
                    }
                }
            }
            if let StrategyNode::Graph(g) = node {
                let Some(first) = g.children.first() else {
                    return Err(GraphError::NoChildren(g.name.clone()));
                };
                for c in &g.children {
                    if c.inputs.len() != first.inputs.len() || c.outputs.len() != first.outputs.len() {
                        return Err(GraphError::ChildBoundaries(g.name.clone()));
                    }
                    c.validate(theory)?;
                }
            }
        }
        Ok(())
    }

    /// Tactic nodes in pre-order from the input boundary, following output
    /// ports in order; unreachable nodes come last by id.
    pub fn preorder(&self) -> Vec<NodeId> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let mut stack: Vec<NodeId> = Vec::new();
        let push_targets = |ws: &[WireId], stack: &mut Vec<NodeId>| {
            let mut targets: Vec<(usize, WireId, NodeId)> = ws
                .iter()
                .filter_map(|w| {
                    let port = match self.wires[w].src {
                        Endpoint::Port(_, p) => p,
                        Endpoint::Boundary => 0,
                    };
                    self.logical_dst(*w).node().map(|n| (port, *w, n))
                })
                .collect();
            targets.sort();
            for (_, _, n) in targets.into_iter().rev() {
                stack.push(n);
            }
        };
        push_targets(&self.inputs, &mut stack);
        loop {
            while let Some(n) = stack.pop() {
                if !seen.insert(n) {
                    continue;
                }
                out.push(n);
                push_targets(&self.out_wires(n), &mut stack);
            }
            match self
                .nodes
                .iter()
                .find(|(id, k)| k.is_tactic() && !seen.contains(id))
            {
                Some((id, _)) => stack.push(*id),
                None => break,
            }
        }
        out
    }

    /// Puts goals on a wire by splitting it with a goal node.
    pub fn place_goals(&mut self, w: WireId, goals: Vec<Goal>) -> NodeId {
        let g = self.add_node(StrategyNode::Goals(goals));
        let old = self.wires[&w].clone();
        let rest = WireId(self.next_wire);
        self.insert_wire(
            rest,
            Wire {
                src: Endpoint::Port(g, 0),
                dst: old.dst,
                label: old.label.clone(),
            },
        );
        self.wires.get_mut(&w).unwrap().dst = Endpoint::Port(g, 0);
        if let Some(slot) = self.outputs.iter_mut().find(|o| **o == w) {
            *slot = rest;
        }
        g
    }

    /// Removes a goal node and rejoins the wire it split.
    pub fn remove_goal_node(&mut self, g: NodeId) -> Option<Vec<Goal>> {
        let Some(StrategyNode::Goals(_)) = self.nodes.get(&g) else {
            return None;
        };
        let inw = self.in_wires(g)[0];
        let outw = self.out_wires(g)[0];
        let out = self.wires.remove(&outw).unwrap();
        self.wires.get_mut(&inw).unwrap().dst = out.dst;
        if let Some(slot) = self.outputs.iter_mut().find(|o| **o == outw) {
            *slot = inw;
        }
        match self.nodes.remove(&g) {
            Some(StrategyNode::Goals(gs)) => Some(gs),
            _ => None,
        }
    }

    /// Goal nodes in evaluation order: by the pre-order rank of the node they
    /// feed, then by id.
    pub fn goal_nodes(&self) -> Vec<NodeId> {
        let rank: BTreeMap<NodeId, usize> = self.preorder().into_iter().enumerate().map(|(i, n)| (n, i)).collect();
        let mut gs: Vec<(usize, NodeId)> = self
            .nodes
            .iter()
            .filter(|(_, k)| matches!(k, StrategyNode::Goals(_)))
            .map(|(id, _)| {
                let w = self.out_wires(*id)[0];
                let r = self
                    .logical_dst(w)
                    .node()
                    .and_then(|n| rank.get(&n).copied())
                    .unwrap_or(usize::MAX);
                (r, *id)
            })
            .collect();
        gs.sort();
        gs.into_iter().map(|(_, id)| id).collect()
    }
}
