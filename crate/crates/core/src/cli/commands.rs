//! Command implementations. Each returns its exit code and output text so
//! tests can drive them without spawning a process.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::strategy_file::{parse_strategy, print_strategy};
use super::theory::parse_theory;
use crate::generalise::generalise_pipeline;
use crate::graph::{evaluate, initial_goal, to_dot, EvalContext, EvalError, EvalStatus};
use crate::kernel::{replay_script, ReplayError, Theory};
use crate::lattice::text::{parse_class_expr, parse_feature_data, parse_goal_type_from, TextError};
use crate::lattice::{Feature, GoalType};
use crate::lexer::{Cursor, Tok};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PIPELINE: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, stdout: String, message: impl Into<String>) -> Self {
        let mut stderr = message.into();
        stderr.push('\n');
        Outcome { code, stdout, stderr }
    }
}

fn load_theory(path: &Path) -> Result<Theory, Outcome> {
    let src = fs::read_to_string(path)
        .map_err(|e| Outcome::fail(EXIT_PARSE, String::new(), format!("{}: {e}", path.display())))?;
    parse_theory(&src).map_err(|e| Outcome::fail(EXIT_PARSE, String::new(), format!("{}: {e}", path.display())))
}

fn replay(th: &Theory, conjecture: &str, script: &str) -> Result<crate::kernel::ProofTrace, Outcome> {
    let Some(s) = th.scripts.get(script) else {
        return Err(Outcome::fail(EXIT_PARSE, String::new(), format!("unknown script `{script}`")));
    };
    replay_script(th, conjecture, &s.tactics).map_err(|e| match e {
        ReplayError::UnknownConjecture(_) => Outcome::fail(EXIT_PARSE, String::new(), e.to_string()),
        _ => Outcome::fail(EXIT_FAILED, String::new(), e.to_string()),
    })
}

fn goal_list(states: &[crate::kernel::ProofState]) -> String {
    let v: Vec<String> = states.iter().map(|s| s.concl.to_string()).collect();
    format!("[{}]", v.join(", "))
}

/// Replays `script` on `conjecture`, printing the open goals after each step.
pub fn cmd_check(theory: &Path, conjecture: &str, script: &str) -> Outcome {
    let th = match load_theory(theory) {
        Ok(t) => t,
        Err(o) => return o,
    };
    let trace = match replay(&th, conjecture, script) {
        Ok(t) => t,
        Err(o) => return o,
    };
    let frontiers = trace.frontiers();
    let tactics = trace.root.preorder();
    let mut out = String::new();
    writeln!(out, "0. {}", goal_list(&frontiers[0])).unwrap();
    for (i, (node, goals)) in tactics.iter().zip(&frontiers[1..]).enumerate() {
        writeln!(out, "{}. {} => {}", i + 1, node.tactic, goal_list(goals)).unwrap();
    }
    writeln!(out, "proved {conjecture} in {} steps", tactics.len()).unwrap();
    Outcome::ok(out)
}

/// Replays and generalises; writes `step-NNN.strat`/`.dot` per snapshot and
/// `strategy.strat`/`.dot` for the result into `out_dir`.
pub fn cmd_generalise(theory: &Path, conjecture: &str, script: &str, out_dir: &Path) -> Outcome {
    let th = match load_theory(theory) {
        Ok(t) => t,
        Err(o) => return o,
    };
    let trace = match replay(&th, conjecture, script) {
        Ok(t) => t,
        Err(o) => return o,
    };
    let snaps = match generalise_pipeline(&trace) {
        Ok(s) => s,
        Err(e) => return Outcome::fail(EXIT_PIPELINE, String::new(), e.to_string()),
    };
    let mut out = String::new();
    let write = |name: String, g: &crate::graph::StrategyGraph| -> Result<(), String> {
        let text = print_strategy(g).map_err(|e| e.to_string())?;
        fs::write(out_dir.join(format!("{name}.strat")), text).map_err(|e| e.to_string())?;
        fs::write(out_dir.join(format!("{name}.dot")), to_dot(g)).map_err(|e| e.to_string())
    };
    if let Err(e) = fs::create_dir_all(out_dir) {
        return Outcome::fail(EXIT_PIPELINE, out, format!("{}: {e}", out_dir.display()));
    }
    for (i, s) in snaps.iter().enumerate() {
        let name = format!("step-{i:03}");
        if let Err(e) = write(name.clone(), &s.graph) {
            return Outcome::fail(EXIT_PIPELINE, out, e);
        }
        writeln!(out, "{name} {} ({} nodes)", s.rule, s.graph.tactic_count()).unwrap();
    }
    let last = &snaps.last().expect("pipeline yields the trace graph").graph;
    if let Err(e) = write("strategy".to_string(), last) {
        return Outcome::fail(EXIT_PIPELINE, out, e);
    }
    writeln!(out, "strategy ({} nodes)", last.tactic_count()).unwrap();
    Outcome::ok(out)
}

/// Runs a strategy file on `conjecture` and prints the tactic transcript.
pub fn cmd_eval(theory: &Path, conjecture: &str, strategy: &Path, budget: usize) -> Outcome {
    let th = match load_theory(theory) {
        Ok(t) => t,
        Err(o) => return o,
    };
    let graph = match fs::read_to_string(strategy).map_err(|e| e.to_string()).and_then(|s| parse_strategy(&s).map_err(|e| e.to_string())) {
        Ok(g) => g,
        Err(e) => return Outcome::fail(EXIT_PARSE, String::new(), format!("{}: {e}", strategy.display())),
    };
    if let Err(e) = graph.validate(&th) {
        return Outcome::fail(EXIT_PARSE, String::new(), format!("{}: {e}", strategy.display()));
    }
    let Some(conj) = th.conjectures.get(conjecture) else {
        return Outcome::fail(EXIT_PARSE, String::new(), format!("unknown conjecture `{conjecture}`"));
    };
    let Some(ty) = graph.inputs().first().and_then(|w| graph.wire(*w)).and_then(|w| w.label.goal_type()) else {
        return Outcome::fail(EXIT_PARSE, String::new(), "strategy has no concretely typed input");
    };
    let goal = match initial_goal(conj.initial_state(), ty) {
        Ok(g) => g,
        Err(e) => return Outcome::fail(EXIT_FAILED, String::new(), format!("{conjecture} does not fit the strategy: {e}")),
    };
    let ctx = EvalContext::with_budget(&th, budget);
    let result = match evaluate(&ctx, &graph, goal) {
        Ok(r) => r,
        Err(e @ EvalError::BudgetExhausted(_)) => return Outcome::fail(EXIT_BUDGET, String::new(), e.to_string()),
        Err(e) => return Outcome::fail(EXIT_FAILED, String::new(), e.to_string()),
    };
    let mut out = String::new();
    for (i, t) in result.transcript.iter().enumerate() {
        writeln!(out, "{}. {} on {} => {}", i + 1, t.tactic, t.consumed.ps.concl, goal_list(&t.produced)).unwrap();
    }
    match result.status {
        EvalStatus::Proved => {
            writeln!(out, "proved {conjecture} in {} steps", result.transcript.len()).unwrap();
            Outcome::ok(out)
        }
        EvalStatus::Open => {
            let open: Vec<_> = result.open_goals.iter().map(|g| g.ps.clone()).collect();
            Outcome::fail(EXIT_FAILED, out, format!("not proved; open goals {}", goal_list(&open)))
        }
        EvalStatus::Stuck => Outcome::fail(EXIT_FAILED, out, "not proved; no tactic applies"),
    }
}

enum Operand {
    Data(Feature, crate::lattice::FeatureData, crate::lattice::FeatureData),
    Types(GoalType, GoalType),
    Classes(crate::lattice::GoalClass, crate::lattice::GoalClass),
}

fn lattice_operands(cur: &mut Cursor) -> Result<Operand, TextError> {
    if let Some(Tok::Ident(name)) = cur.peek() {
        if let Some(f) = Feature::from_name(name) {
            cur.next();
            let x = parse_feature_data(cur, f)?;
            let y = parse_feature_data(cur, f)?;
            return Ok(Operand::Data(f, x, y));
        }
        if name == "gt" {
            let x = parse_goal_type_from(cur)?;
            let y = parse_goal_type_from(cur)?;
            return Ok(Operand::Types(x, y));
        }
    }
    let x = parse_class_expr(cur)?;
    if cur.at_end() {
        return Err(cur.error("expected a second operand").into());
    }
    let y = parse_class_expr(cur)?;
    Ok(Operand::Classes(x, y))
}

/// Evaluates `OP FEATURE DATA DATA`, `OP CLASS CLASS` or `OP GT GT` where OP
/// is meet, join, orthogonal or subtype.
pub fn cmd_lattice(expr: &str) -> Outcome {
    let parsed = (|| -> Result<(String, Operand), TextError> {
        let mut cur = Cursor::new(expr)?;
        let op = cur.ident()?;
        let operands = lattice_operands(&mut cur)?;
        cur.finish()?;
        Ok((op, operands))
    })();
    let (op, operands) = match parsed {
        Ok(p) => p,
        Err(e) => return Outcome::fail(EXIT_PARSE, String::new(), e.to_string()),
    };
    let result = match (op.as_str(), operands) {
        ("meet", Operand::Data(f, x, y)) => f.meet(&x, &y).to_string(),
        ("join", Operand::Data(f, x, y)) => f.join(&x, &y).to_string(),
        ("orthogonal", Operand::Data(f, x, y)) => f.orthogonal(&x, &y).to_string(),
        ("subtype", Operand::Data(f, x, y)) => f.subtype(&x, &y).to_string(),
        ("meet", Operand::Classes(x, y)) => x.meet(&y).to_string(),
        ("join", Operand::Classes(x, y)) => x.join(&y).to_string(),
        ("orthogonal", Operand::Classes(x, y)) => x.orthogonal(&y).to_string(),
        ("subtype", Operand::Classes(x, y)) => x.subtype(&y).to_string(),
        ("join", Operand::Types(x, y)) => match x.gen(&y) {
            Ok(t) => t.to_string(),
            Err(e) => return Outcome::fail(EXIT_FAILED, String::new(), e.to_string()),
        },
        ("orthogonal", Operand::Types(x, y)) => x.orthogonal(&y).to_string(),
        ("subtype", Operand::Types(x, y)) => x.subtype(&y).to_string(),
        (other, _) => return Outcome::fail(EXIT_PARSE, String::new(), format!("unsupported lattice operation `{other}`")),
    };
    Outcome::ok(format!("{result}\n"))
}
