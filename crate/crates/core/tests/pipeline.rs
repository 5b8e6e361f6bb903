mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use stratgen::generalise::{
    apply_loop1, apply_loop2, find_repeated_segments, gen_tactic, generalise_graph, generalise_pipeline,
    largest_common_subgraph, layer, pushout_gen, trace_to_graph, LayerError,
};
use stratgen::graph::{Endpoint, GraphTactic, NodeId, StrategyGraph, StrategyNode, WireId, WireLabel};
use stratgen::kernel::TacticApp;
use stratgen::lattice::text::parse_goal_type;
use stratgen::lattice::GoalType;

#[test]
fn generalisation_reaches_the_mutation_strategy() {
    criterion_6().unwrap();
}

#[test]
fn every_snapshot_still_proves_the_first_conjecture() {
    criterion_8().unwrap();
}

#[test]
fn snapshot_rules_in_order() {
    let th = theory();
    let rules: Vec<&str> = snapshots(&th).iter().map(|s| s.rule).collect();
    assert_eq!(rules, ["trace", "loop1", "loop2", "loop2", "layer", "pushout", "loop1"]);
}

fn all_graphs(g: &StrategyGraph) -> Vec<&StrategyGraph> {
    let mut out = vec![g];
    for (_, n) in g.nodes() {
        if let StrategyNode::Graph(gt) = n {
            for c in &gt.children {
                out.extend(all_graphs(c));
            }
        }
    }
    out
}

fn label(g: &StrategyGraph, w: WireId) -> &GoalType {
    g.wire(w).unwrap().label.goal_type().unwrap()
}

#[test]
fn loop_exits_are_orthogonal_to_feedback() {
    let th = theory();
    for s in snapshots(&th) {
        for g in all_graphs(&s.graph) {
            for (n, _) in g.nodes() {
                for fb in g.feedback_wires(n) {
                    for ex in g.exit_wires(n) {
                        assert!(label(g, fb).orthogonal(label(g, ex)), "{}: {n} {fb} vs {ex}", s.rule);
                    }
                }
            }
        }
    }
}

#[test]
fn result_is_a_fixpoint() {
    let th = theory();
    let g = mutation_strategy(&th);
    assert!(generalise_graph(g.clone()).is_empty());
    assert!(apply_loop1(&g).is_none() && apply_loop2(&g).is_none());
    assert!(find_repeated_segments(&g).is_none());
}

#[test]
fn pipeline_is_deterministic() {
    let th = theory();
    assert_eq!(snapshots(&th), snapshots(&th));
}

#[test]
fn one_step_trace_is_left_alone() {
    let th = theory();
    let snaps = generalise_pipeline(&trace(&th, "trivial", "one")).unwrap();
    assert_eq!(snaps.len(), 1);
    assert_eq!(snaps[0].graph.tactic_count(), 1);
}

#[test]
fn second_conjecture_trace_has_no_loops() {
    let th = theory();
    let snaps = generalise_pipeline(&trace(&th, "conj2", "short2")).unwrap();
    let g = &snaps.last().unwrap().graph;
    assert_eq!(g.tactic_count(), 4);
    assert!(g.nodes().all(|(n, _)| !g.is_looped(n)));
}

fn labels_by_wire(g: &StrategyGraph, out: &mut BTreeMap<WireId, Vec<GoalType>>) {
    for sub in all_graphs(g) {
        for (id, w) in sub.wires() {
            if let WireLabel::Concrete(t) = &w.label {
                out.entry(id).or_default().push(t.clone());
            }
        }
    }
}

#[test]
fn surviving_wire_labels_only_widen() {
    let th = theory();
    let snaps = snapshots(&th);
    let mut before = BTreeMap::new();
    labels_by_wire(&snaps[0].graph, &mut before);
    let mut after = BTreeMap::new();
    labels_by_wire(&snaps.last().unwrap().graph, &mut after);
    let mut compared = 0;
    for (w, olds) in &before {
        let Some(news) = after.get(w) else { continue };
        for old in olds {
            for new in news {
                assert!(old.subtype(new), "wire {w} narrowed");
                compared += 1;
            }
        }
    }
    assert!(compared >= 5);
}

#[test]
fn repeated_segments_of_the_mutation_phase() {
    let th = theory();
    let snaps = snapshots(&th);
    let before_layer = &snaps[3].graph;
    let m = find_repeated_segments(before_layer).unwrap();
    let want: BTreeMap<NodeId, NodeId> = [(4, 6), (5, 7)].into_iter().map(|(a, b)| (NodeId(a), NodeId(b))).collect();
    assert_eq!(m.pairs, want);
    // No segment repeats in the raw trace of the short proof.
    assert!(find_repeated_segments(&trace_to_graph(&trace(&th, "conj2", "short2")).unwrap()).is_none());
}

#[test]
fn layering_keeps_the_outer_wires() {
    let th = theory();
    let snaps = snapshots(&th);
    let g = &snaps[3].graph;
    let seg: BTreeSet<NodeId> = [NodeId(4), NodeId(5)].into();
    let (out, n) = layer(g, &seg, "seg").unwrap();
    assert_eq!(out.tactic_count(), g.tactic_count() - 1);
    assert_eq!(out.in_wires(n), vec![WireId(4)]);
    assert_eq!(out.out_wires(n), vec![WireId(6)]);
    let Some(StrategyNode::Graph(gt)) = out.node(n) else { panic!() };
    assert_eq!(gt.children[0].inputs(), [WireId(4)]);
    assert_eq!(gt.children[0].outputs(), [WireId(6)]);
}

fn ty(src: &str) -> WireLabel {
    WireLabel::Concrete(parse_goal_type(src).unwrap())
}

const STAR: &str = "gt {concl: {top_symbol: [[*]]}, facts: {}, link: {}}";
const WEDGE: &str = r"gt {concl: {top_symbol: [[/\]]}, facts: {}, link: {}}";

#[test]
fn layering_refuses_overlapping_outputs() {
    let mut g = StrategyGraph::new();
    let n = g.add_node(StrategyNode::Atomic(TacticApp::subst(["ax2"])));
    let r1 = g.add_node(StrategyNode::Atomic(TacticApp::rule_class("H")));
    let r2 = g.add_node(StrategyNode::Atomic(TacticApp::rule_class("H")));
    g.add_wire(Endpoint::Boundary, Endpoint::Port(n, 0), ty(STAR));
    g.add_wire(Endpoint::Port(n, 0), Endpoint::Port(r1, 0), ty(STAR));
    g.add_wire(Endpoint::Port(n, 1), Endpoint::Port(r2, 0), ty(STAR));
    assert_eq!(layer(&g, &[n].into(), "x").unwrap_err(), LayerError::NotOrthogonal("output"));
    assert_eq!(layer(&g, &BTreeSet::new(), "x").unwrap_err(), LayerError::Empty);
}

fn chain(tactics: &[TacticApp], labels: &[&str]) -> StrategyGraph {
    let mut g = StrategyGraph::new();
    let mut src = Endpoint::Boundary;
    for (t, l) in tactics.iter().zip(labels) {
        let n = g.add_node(StrategyNode::Atomic(t.clone()));
        g.add_wire(src, Endpoint::Port(n, 0), ty(l));
        src = Endpoint::Port(n, 0);
    }
    g.add_wire(src, Endpoint::Boundary, ty(labels[tactics.len()]));
    g
}

#[test]
fn fusing_bodies_that_differ_in_subst_arguments() {
    let a = GraphTactic {
        name: "pax1a".into(),
        children: vec![chain(&[TacticApp::subst(["ax1"]), TacticApp::rule_class("H")], &[STAR, STAR, STAR])],
    };
    let b = GraphTactic {
        name: "pax1b".into(),
        children: vec![chain(&[TacticApp::subst(["ax2"]), TacticApp::rule_class("H")], &[STAR, WEDGE, STAR])],
    };
    let fused = pushout_gen(&a, &b).unwrap();
    assert_eq!(fused.name, "pax1");
    assert_eq!(fused.children.len(), 1);
    let body = &fused.children[0];
    let kinds: Vec<String> = body.nodes().map(|(_, n)| n.short_label()).collect();
    assert_eq!(kinds, ["subst {ax1, ax2}", "rule class H"]);
    let mid = body.wire(WireId(1)).unwrap().label.goal_type().unwrap();
    assert!(parse_goal_type(STAR).unwrap().subtype(mid) && parse_goal_type(WEDGE).unwrap().subtype(mid));
    assert_eq!(
        gen_tactic(&StrategyNode::Graph(a.clone()), &StrategyNode::Graph(a.clone())),
        Some(StrategyNode::Graph(a))
    );
}

#[test]
fn partial_overlap_keeps_both_bodies() {
    let a = GraphTactic {
        name: "x".into(),
        children: vec![chain(&[TacticApp::subst(["ax1"]), TacticApp::rule_class("H")], &[STAR, STAR, STAR])],
    };
    let b = GraphTactic {
        name: "y".into(),
        children: vec![chain(
            &[TacticApp::subst(["ax1"]), TacticApp::subst(["ax2"]), TacticApp::rule_class("H")],
            &[STAR, STAR, STAR, STAR],
        )],
    };
    let m = largest_common_subgraph(&a.children[0], &b.children[0]);
    assert_eq!(m.len(), 2);
    let fused = pushout_gen(&a, &b).unwrap();
    assert_eq!(fused.name, "x_y");
    assert_eq!(fused.children.len(), 2);
}

#[test]
fn loop1_needs_a_narrowing_feedback_type() {
    // Two ax1 steps whose middle wire is wider than the input: no loop.
    let g = chain(&[TacticApp::subst(["ax1"]), TacticApp::subst(["ax1"])], &[STAR, "gt {concl: {}, facts: {}, link: {}}", WEDGE]);
    assert!(apply_loop1(&g).is_none());
    // Narrow middle, orthogonal exit: folds into one looped node.
    let g = chain(&[TacticApp::subst(["ax1"]), TacticApp::subst(["ax1"])], &[STAR, STAR, WEDGE]);
    let looped = apply_loop1(&g).unwrap();
    assert_eq!(looped.tactic_count(), 1);
    let n = looped.preorder()[0];
    assert!(looped.is_looped(n));
    // A non-orthogonal exit would make routing ambiguous.
    let g = chain(&[TacticApp::subst(["ax1"]), TacticApp::subst(["ax1"])], &[STAR, STAR, STAR]);
    assert!(apply_loop1(&g).is_none());
}
