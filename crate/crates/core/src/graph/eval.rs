use std::cell::Cell;
use std::collections::BTreeMap;

use thiserror::Error;

use super::lift::{route, run_on_goal, LiftError};
use super::{Endpoint, NodeId, StrategyGraph, StrategyNode, WireId};
use crate::kernel::{KernelError, ProofState, TacticApp, Theory};
use crate::lattice::{goal_has_type, Goal, GoalType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("evaluation budget of {0} steps exhausted")]
    BudgetExhausted(usize),
    #[error("wire {0} has no concrete goal type")]
    VariableLabel(WireId),
    #[error("goal on wire {0} does not have the wire's type")]
    TypeViolation(WireId),
    #[error("strategy has no input wire")]
    NoInput,
    #[error("initial goal does not fit the strategy's input type: {0}")]
    InitialType(LiftError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

pub struct EvalContext<'a> {
    pub theory: &'a Theory,
    pub budget: usize,
    steps: Cell<usize>,
}

impl<'a> EvalContext<'a> {
    pub const DEFAULT_BUDGET: usize = 10_000;

    pub fn new(theory: &'a Theory) -> Self {
        EvalContext::with_budget(theory, Self::DEFAULT_BUDGET)
    }

    pub fn with_budget(theory: &'a Theory, budget: usize) -> Self {
        EvalContext {
            theory,
            budget,
            steps: Cell::new(0),
        }
    }

    pub fn steps(&self) -> usize {
        self.steps.get()
    }

    fn tick(&self) -> Result<(), EvalError> {
        let n = self.steps.get() + 1;
        if n > self.budget {
            return Err(EvalError::BudgetExhausted(self.budget));
        }
        self.steps.set(n);
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptEntry {
    pub tactic: TacticApp,
    /// Label of the wire the goal arrived on.
    pub input_label: GoalType,
    pub consumed: Goal,
    pub produced: Vec<ProofState>,
}

#[derive(Debug, Clone)]
pub struct Successor {
    pub graph: StrategyGraph,
    pub transcript: Vec<TranscriptEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalStatus {
    Proved,
    Open,
    Stuck,
}

#[derive(Debug, Clone)]
pub struct EvalResult {
    pub status: EvalStatus,
    pub transcript: Vec<TranscriptEntry>,
    pub open_goals: Vec<Goal>,
    pub graph: StrategyGraph,
}

fn concrete(graph: &StrategyGraph, w: WireId) -> Result<&GoalType, EvalError> {
    graph.wire(w).unwrap().label.goal_type().ok_or(EvalError::VariableLabel(w))
}

/// Structural clean-up: drop an empty goal node or split a multi-goal node.
fn normalise(graph: &StrategyGraph) -> Option<StrategyGraph> {
    for (id, node) in graph.nodes() {
        let StrategyNode::Goals(gs) = node else { continue };
        if gs.len() == 1 {
            continue;
        }
        let mut g = graph.clone();
        let goals = g.remove_goal_node(id).unwrap();
        if !goals.is_empty() {
            let mut w = graph.in_wires(id)[0];
            for goal in goals {
                let gn = g.place_goals(w, vec![goal]);
                w = g.out_wires(gn)[0];
            }
        }
        return Some(g);
    }
    None
}

/// First goal node waiting in front of a tactic.
fn pending(graph: &StrategyGraph) -> Option<NodeId> {
    graph.goal_nodes().into_iter().find(|g| {
        let w = graph.out_wires(*g)[0];
        matches!(graph.logical_dst(w), Endpoint::Port(n, _) if graph.node(n).is_some_and(StrategyNode::is_tactic))
    })
}

/// Output wires of a port, feedback first.
fn port_wires(graph: &StrategyGraph, n: NodeId, port: usize) -> Vec<WireId> {
    let mut ws = graph.out_wires_at(n, port);
    ws.sort_by_key(|w| (graph.logical_dst(*w).node() != Some(n), *w));
    ws
}

fn place_grouped(graph: &mut StrategyGraph, placed: Vec<(WireId, Goal)>) {
    let mut by_wire: BTreeMap<WireId, Vec<Goal>> = BTreeMap::new();
    for (w, g) in placed {
        by_wire.entry(w).or_default().push(g);
    }
    for (w, gs) in by_wire {
        graph.place_goals(w, gs);
    }
}

/// One evaluation step on the first waiting goal. Returns every successor
/// graph; an empty result means the goal is stuck or nothing is waiting.
pub fn eval_step(ctx: &EvalContext, graph: &StrategyGraph) -> Result<Vec<Successor>, EvalError> {
    ctx.tick()?;
    if let Some(g) = normalise(graph) {
        return Ok(vec![Successor {
            graph: g,
            transcript: Vec::new(),
        }]);
    }
    let Some(gnode) = pending(graph) else {
        return Ok(Vec::new());
    };
    let w = graph.out_wires(gnode)[0];
    let alpha = concrete(graph, w)?.clone();
    let Endpoint::Port(n, in_port) = graph.logical_dst(w) else {
        unreachable!("pending goals feed a node")
    };
    let mut base = graph.clone();
    let goal = base.remove_goal_node(gnode).unwrap().remove(0);
    if !goal_has_type(&goal, &alpha) {
        return Err(EvalError::TypeViolation(w));
    }
    let arity = graph.output_arity(ctx.theory, n).map_err(|e| match e {
        super::GraphError::Kernel(k) => EvalError::Kernel(k),
        _ => EvalError::VariableLabel(w),
    })?;
    let mut options: Vec<(WireId, GoalType)> = Vec::new();
    for p in 0..arity {
        for ow in port_wires(&base, n, p) {
            options.push((ow, concrete(&base, ow)?.clone()));
        }
    }
    let mut out = Vec::new();
    match base.node(n).unwrap().clone() {
        StrategyNode::Atomic(tac) => {
            let labels: Vec<&GoalType> = options.iter().map(|(_, t)| t).collect();
            for alt in run_on_goal(ctx.theory, &tac, &goal)? {
                for assignment in route(&alt, &goal, &labels) {
                    let mut g = base.clone();
                    place_grouped(&mut g, assignment.into_iter().map(|(i, goal)| (options[i].0, goal)).collect());
                    out.push(Successor {
                        graph: g,
                        transcript: vec![TranscriptEntry {
                            tactic: tac.clone(),
                            input_label: alpha.clone(),
                            consumed: goal.clone(),
                            produced: alt.clone(),
                        }],
                    });
                }
            }
        }
        StrategyNode::Graph(gt) => {
            for child in &gt.children {
                for (outputs, transcript) in run_nested(ctx, child, in_port, &goal)? {
                    // Each output goal goes to some outer wire of its port whose type it has.
                    let mut acc: Vec<Vec<(WireId, Goal)>> = vec![Vec::new()];
                    for (port, goals) in outputs.into_iter().enumerate() {
                        for og in goals {
                            let fits: Vec<WireId> = port_wires(&base, n, port)
                                .into_iter()
                                .filter(|ow| {
                                    base.wire(*ow)
                                        .unwrap()
                                        .label
                                        .goal_type()
                                        .is_some_and(|t| goal_has_type(&og, t))
                                })
                                .collect();
                            let mut next = Vec::new();
                            for prefix in &acc {
                                for ow in &fits {
                                    let mut p = prefix.clone();
                                    p.push((*ow, og.clone()));
                                    next.push(p);
                                }
                            }
                            acc = next;
                        }
                    }
                    for placed in acc {
                        let mut g = base.clone();
                        place_grouped(&mut g, placed);
                        out.push(Successor {
                            graph: g,
                            transcript: transcript.clone(),
                        });
                    }
                }
            }
        }
        StrategyNode::Goals(_) => unreachable!("pending goals feed a tactic"),
    }
    Ok(out)
}

type NestedOutcome = (Vec<Vec<Goal>>, Vec<TranscriptEntry>);

/// Runs a graph-tactic body to completion from one goal, collecting the goals
/// left on each output for every successful branch.
fn run_nested(ctx: &EvalContext, body: &StrategyGraph, in_port: usize, goal: &Goal) -> Result<Vec<NestedOutcome>, EvalError> {
    let Some(&inw) = body.inputs().get(in_port) else {
        return Ok(Vec::new());
    };
    if !goal_has_type(goal, concrete(body, inw)?) {
        return Ok(Vec::new());
    }
    let mut g = body.clone();
    g.place_goals(inw, vec![goal.clone()]);
    let mut out = Vec::new();
    let mut stack = vec![(g, Vec::new())];
    while let Some((g, transcript)) = stack.pop() {
        if pending(&g).is_none() && normalise(&g).is_none() {
            out.push((boundary_goals(&g), transcript));
            continue;
        }
        let succs = eval_step(ctx, &g)?;
        for s in succs.into_iter().rev() {
            let mut t = transcript.clone();
            t.extend(s.transcript);
            stack.push((s.graph, t));
        }
    }
    Ok(out)
}

fn boundary_goals(g: &StrategyGraph) -> Vec<Vec<Goal>> {
    g.outputs()
        .iter()
        .map(|&w| {
            let mut goals = Vec::new();
            let mut cur = w;
            while let Some(src) = g.wire(cur).unwrap().src.node() {
                match g.node(src) {
                    Some(StrategyNode::Goals(gs)) => {
                        let mut v = gs.clone();
                        v.extend(goals);
                        goals = v;
                        cur = g.in_wires(src)[0];
                    }
                    _ => break,
                }
            }
            goals
        })
        .collect()
}

/// Depth-first search for a proof. Returns the first proved run, otherwise
/// the first run whose goals all rest on the output boundary, otherwise stuck.
pub fn evaluate(ctx: &EvalContext, graph: &StrategyGraph, initial: Goal) -> Result<EvalResult, EvalError> {
    let &inw = graph.inputs().first().ok_or(EvalError::NoInput)?;
    let ty = concrete(graph, inw)?;
    if !goal_has_type(&initial, ty) {
        return Err(EvalError::InitialType(LiftError::Precondition));
    }
    let mut g = graph.clone();
    g.place_goals(inw, vec![initial]);
    let mut open: Option<EvalResult> = None;
    let mut deepest: (Vec<TranscriptEntry>, StrategyGraph) = (Vec::new(), g.clone());
    let mut stack = vec![(g, Vec::new())];
    while let Some((g, transcript)) = stack.pop() {
        if pending(&g).is_none() && normalise(&g).is_none() {
            let goals: Vec<Goal> = boundary_goals(&g).into_iter().flatten().collect();
            if goals.is_empty() {
                return Ok(EvalResult {
                    status: EvalStatus::Proved,
                    transcript,
                    open_goals: goals,
                    graph: g,
                });
            }
            if open.is_none() {
                open = Some(EvalResult {
                    status: EvalStatus::Open,
                    transcript,
                    open_goals: goals,
                    graph: g,
                });
            }
            continue;
        }
        let succs = eval_step(ctx, &g)?;
        if succs.is_empty() && transcript.len() >= deepest.0.len() {
            deepest = (transcript.clone(), g.clone());
        }
        for s in succs.into_iter().rev() {
            let mut t = transcript.clone();
            t.extend(s.transcript);
            stack.push((s.graph, t));
        }
    }
    Ok(open.unwrap_or(EvalResult {
        status: EvalStatus::Stuck,
        transcript: deepest.0,
        open_goals: Vec::new(),
        graph: deepest.1,
    }))
}
