use std::fmt::Write;

use super::{Endpoint, StrategyGraph, StrategyNode, WireLabel};
use crate::lattice::{ClassRef, Feature, GoalType};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Short wire caption: conclusion top symbol plus the conclusion links.
fn abbreviate(ty: &GoalType) -> String {
    let mut parts = vec![format!("top={}", ty.concl.get(Feature::TopSymbol))];
    for (k, d) in ty.link.entries() {
        if k.left == ClassRef::Concl {
            let short = match k.feature {
                Feature::SymbAtPos => "pos",
                Feature::IsMatch => "eq",
                f => f.name(),
            };
            parts.push(format!("{short}({})={d}", k.right));
        }
    }
    parts.join(" ")
}

fn node_line(out: &mut String, id: &str, node: &StrategyNode) {
    let (shape, label) = match node {
        StrategyNode::Atomic(t) => ("box", t.to_string()),
        StrategyNode::Graph(g) => ("box3d", g.name.clone()),
        StrategyNode::Goals(gs) => ("ellipse", format!("{} goal(s)", gs.len())),
    };
    writeln!(out, "  {id} [shape={shape}, label=\"{}\"];", escape(&label)).unwrap();
}

/// Graphviz rendering with one point node per boundary wire end.
pub fn to_dot(graph: &StrategyGraph) -> String {
    let mut out = String::from("digraph strategy {\n");
    for (id, node) in graph.nodes() {
        node_line(&mut out, &id.to_string(), node);
    }
    for w in graph.inputs() {
        writeln!(out, "  in_{w} [shape=point];").unwrap();
    }
    for w in graph.outputs() {
        writeln!(out, "  out_{w} [shape=point];").unwrap();
    }
    for (id, w) in graph.wires() {
        let src = match w.src {
            Endpoint::Boundary => format!("in_{id}"),
            Endpoint::Port(n, _) => n.to_string(),
        };
        let dst = match w.dst {
            Endpoint::Boundary => format!("out_{id}"),
            Endpoint::Port(n, _) => n.to_string(),
        };
        let label = match &w.label {
            WireLabel::Concrete(ty) => abbreviate(ty),
            WireLabel::Var(v) => format!("?{v}"),
        };
        let port = match w.src {
            Endpoint::Port(_, p) => format!(", taillabel=\"{p}\""),
            Endpoint::Boundary => String::new(),
        };
        writeln!(out, "  {src} -> {dst} [label=\"{}\"{port}];", escape(&label)).unwrap();
    }
    out.push_str("}\n");
    out
}
