//! Plain-text strategy files.
//!
//! ```text
//! node n0 kind=subst {ax1}
//! node n1 kind=rule class H
//! node n2 kind=graph name=pax2 { ...body... } { ...alternative... }
//! wire w0 in -> n0.0 label=gt {...}
//! wire w1 n0.0 -> out label=?x
//! input w0
//! output w1
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use super::theory::parse_tactic;
use crate::graph::{Endpoint, GraphTactic, NodeId, StrategyGraph, StrategyNode, Wire, WireId, WireLabel};
use crate::lattice::text::{parse_goal_type_from, TextError};
use crate::lexer::{strip_comments, Cursor, SyntaxError, Tok};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyFileError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error("goal nodes cannot be written to a strategy file")]
    GoalNode,
    #[error("wire {0} is declared twice")]
    DuplicateWire(WireId),
    #[error("node {0} is declared twice")]
    DuplicateNode(NodeId),
}

fn endpoint(e: Endpoint, boundary: &str) -> String {
    match e {
        Endpoint::Boundary => boundary.to_string(),
        Endpoint::Port(n, p) => format!("{n}.{p}"),
    }
}

fn write_graph(out: &mut String, g: &StrategyGraph, indent: usize) -> Result<(), StrategyFileError> {
    let pad = "  ".repeat(indent);
    for (id, node) in g.nodes() {
        match node {
            StrategyNode::Atomic(t) => writeln!(out, "{pad}node {id} kind={t}").unwrap(),
            StrategyNode::Graph(gt) => {
                write!(out, "{pad}node {id} kind=graph name={}", gt.name).unwrap();
                for child in &gt.children {
                    out.push_str(" {\n");
                    write_graph(out, child, indent + 1)?;
                    write!(out, "{pad}}}").unwrap();
                }
                out.push('\n');
            }
            StrategyNode::Goals(_) => return Err(StrategyFileError::GoalNode),
        }
    }
    for (id, w) in g.wires() {
        let label = match &w.label {
            WireLabel::Concrete(t) => t.to_string(),
            WireLabel::Var(v) => format!("?{v}"),
        };
        writeln!(
            out,
            "{pad}wire {id} {} -> {} label={label}",
            endpoint(w.src, "in"),
            endpoint(w.dst, "out")
        )
        .unwrap();
    }
    for w in g.inputs() {
        writeln!(out, "{pad}input {w}").unwrap();
    }
    for w in g.outputs() {
        writeln!(out, "{pad}output {w}").unwrap();
    }
    Ok(())
}

pub fn print_strategy(g: &StrategyGraph) -> Result<String, StrategyFileError> {
    let mut out = String::new();
    write_graph(&mut out, g, 0)?;
    Ok(out)
}

fn prefixed_id(cur: &mut Cursor, prefix: char) -> Result<u32, SyntaxError> {
    let at = cur.offset();
    let s = cur.ident()?;
    s.strip_prefix(prefix)
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| SyntaxError::new(at, format!("expected an id like `{prefix}0`, found `{s}`")))
}

fn parse_endpoint(cur: &mut Cursor, boundary: &str) -> Result<Endpoint, SyntaxError> {
    if cur.eat_keyword(boundary) {
        return Ok(Endpoint::Boundary);
    }
    let n = NodeId(prefixed_id(cur, 'n')?);
    cur.expect(&Tok::Dot)?;
    let p = cur.int()? as usize;
    Ok(Endpoint::Port(n, p))
}

fn parse_graph(cur: &mut Cursor, nested: bool) -> Result<StrategyGraph, StrategyFileError> {
    let mut g = StrategyGraph::new();
    let (mut inputs, mut outputs) = (Vec::new(), Vec::new());
    loop {
        if nested && cur.eat(&Tok::RBrace) {
            break;
        }
        if !nested && cur.at_end() {
            break;
        }
        let kw = cur.ident()?;
        match kw.as_str() {
            "node" => {
                let id = NodeId(prefixed_id(cur, 'n')?);
                if g.node(id).is_some() {
                    return Err(StrategyFileError::DuplicateNode(id));
                }
                cur.expect_keyword("kind")?;
                cur.expect(&Tok::Eq)?;
                let node = if cur.eat_keyword("graph") {
                    cur.expect_keyword("name")?;
                    cur.expect(&Tok::Eq)?;
                    let name = cur.ident()?;
                    let mut children = Vec::new();
                    while cur.eat(&Tok::LBrace) {
                        children.push(parse_graph(cur, true)?);
                    }
                    StrategyNode::Graph(GraphTactic { name, children })
                } else {
                    StrategyNode::Atomic(parse_tactic(cur)?)
                };
                g.insert_node(id, node);
            }
            "wire" => {
                let id = WireId(prefixed_id(cur, 'w')?);
                if g.wire(id).is_some() {
                    return Err(StrategyFileError::DuplicateWire(id));
                }
                let src = parse_endpoint(cur, "in")?;
                cur.expect(&Tok::Arrow)?;
                let dst = parse_endpoint(cur, "out")?;
                cur.expect_keyword("label")?;
                cur.expect(&Tok::Eq)?;
                let label = if cur.eat(&Tok::Question) {
                    WireLabel::Var(cur.ident()?)
                } else {
                    WireLabel::Concrete(parse_goal_type_from(cur)?)
                };
                g.insert_wire(id, Wire { src, dst, label });
            }
            "input" => inputs.push(WireId(prefixed_id(cur, 'w')?)),
            "output" => outputs.push(WireId(prefixed_id(cur, 'w')?)),
            other => return Err(cur.error(format!("unknown strategy item `{other}`")).into()),
        }
    }
    g.set_boundary(inputs, outputs);
    Ok(g)
}

pub fn parse_strategy(src: &str) -> Result<StrategyGraph, StrategyFileError> {
    let mut cur = Cursor::new(&strip_comments(src))?;
    let g = parse_graph(&mut cur, false)?;
    cur.finish()?;
    Ok(g)
}
