//! Fixtures, the brute-force lattice oracle and the acceptance checks,
//! shared by the integration test targets.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use stratgen::cli::commands::{cmd_check, cmd_eval, cmd_generalise};
use stratgen::cli::strategy_file::parse_strategy;
use stratgen::cli::theory::parse_theory;
use stratgen::generalise::{derive_goal_type, generalise_pipeline, Snapshot};
use stratgen::graph::{evaluate, initial_goal, lift_tactic, EvalContext, EvalResult, Endpoint, StrategyGraph, StrategyNode};
use stratgen::kernel::{replay_script, ProofState, ProofTrace, TacticApp, Theory};
use stratgen::lattice::{ClassRef, Datum, Feature, FeatureData, GoalClass, GoalType, LinkKey, sem, Sem};
use stratgen::term::{Op, Position, Symbol, Term};

pub fn theory_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("theories/sep.thy")
}

pub fn theory() -> Theory {
    parse_theory(&std::fs::read_to_string(theory_path()).unwrap()).unwrap()
}

pub fn trace(th: &Theory, conj: &str, script: &str) -> ProofTrace {
    replay_script(th, conj, &th.scripts[script].tactics).unwrap()
}

pub fn snapshots(th: &Theory) -> Vec<Snapshot> {
    generalise_pipeline(&trace(th, "conj1", "fig1")).unwrap()
}

pub fn mutation_strategy(th: &Theory) -> StrategyGraph {
    snapshots(th).pop().unwrap().graph
}

pub fn input_type(g: &StrategyGraph) -> GoalType {
    g.wire(g.inputs()[0]).unwrap().label.goal_type().unwrap().clone()
}

pub fn run(th: &Theory, g: &StrategyGraph, conj: &str) -> EvalResult {
    let goal = initial_goal(th.conjectures[conj].initial_state(), &input_type(g)).unwrap();
    evaluate(&EvalContext::new(th), g, goal).unwrap()
}

pub fn sym(op: Op) -> Datum {
    Datum::Symbol(Symbol::Op(op))
}

pub fn vee() -> Datum {
    Datum::Symbol(Symbol::Name("\\/".into()))
}

pub fn pos(p: &[usize]) -> Datum {
    Datum::Position(Position(p.to_vec()))
}

pub fn concl_h(f: Feature) -> LinkKey {
    LinkKey::new(f, ClassRef::Concl, ClassRef::Fact("H".into()))
}

// ---------------------------------------------------------------------------
// World-model oracle
//
// Each feature value denotes the set of "worlds" whose data satisfy it. A
// world is the relevant observation about an element: its single top symbol
// (or match outcome), or the set of symbols (positions) it carries. One extra
// datum never named by any value stands for the open rest of the universe.

/// The four named atoms per feature; index 4 in a world is the unnamed extra.
pub fn atoms(f: Feature) -> Vec<Datum> {
    match f {
        Feature::TopSymbol | Feature::HasSymbol => vec![sym(Op::Wedge), sym(Op::Star), sym(Op::Pure), vee()],
        Feature::IsMatch => vec![Datum::Bool(true), Datum::Bool(false)],
        Feature::SymbAtPos => vec![pos(&[1]), pos(&[2]), pos(&[1, 1]), pos(&[2, 1])],
    }
}

/// `None` is the empty observation that `bot` denotes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum World {
    One(Option<usize>),
    Many(BTreeSet<usize>),
}

pub fn worlds(f: Feature) -> Vec<World> {
    let n = atoms(f).len() + 1;
    match f {
        Feature::TopSymbol | Feature::IsMatch => std::iter::once(None).chain((0..n).map(Some)).map(World::One).collect(),
        Feature::HasSymbol | Feature::SymbAtPos => (0..1u32 << n)
            .map(|mask| World::Many((0..n).filter(|i| mask & (1 << i) != 0).collect()))
            .collect(),
    }
}

fn holds(f: Feature, d: &Datum, w: &World) -> bool {
    let index = atoms(f).iter().position(|a| a == d);
    match (w, d) {
        (World::One(x), Datum::Bottom) => x.is_none(),
        (World::One(x), _) => index.is_some() && *x == index,
        (World::Many(s), Datum::Bottom) => s.is_empty(),
        (World::Many(s), _) => index.is_some_and(|i| s.contains(&i)),
    }
}

/// Indices of the worlds in the denotation, read off the set-of-sets form.
pub fn denote(f: Feature, d: &FeatureData) -> BTreeSet<usize> {
    let ws = worlds(f);
    match sem(d) {
        Sem::Universe => (0..ws.len()).collect(),
        Sem::Sets(conjs) => (0..ws.len())
            .filter(|&i| conjs.iter().any(|c| c.iter().all(|a| holds(f, a, &ws[i]))))
            .collect(),
    }
}

/// Fixed-seed corpus of canonical values for `f`.
pub fn corpus(f: Feature, n: usize, seed: u64) -> Vec<FeatureData> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut pool = atoms(f);
    pool.push(Datum::Bottom);
    (0..n)
        .map(|_| {
            if rng.gen_ratio(1, 12) {
                return FeatureData::Top;
            }
            let k = rng.gen_range(0..=4);
            let conjs: Vec<Vec<Datum>> = (0..k)
                .map(|_| {
                    let m = rng.gen_range(1..=3);
                    (0..m).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect()
                })
                .collect();
            f.data(conjs)
        })
        .collect()
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

/// Lattice laws plus agreement with the oracle on one triple.
pub fn lattice_laws(f: Feature, x: &FeatureData, y: &FeatureData, z: &FeatureData) -> Result<(), String> {
    let (m, j) = (|a: &FeatureData, b: &FeatureData| f.meet(a, b), |a: &FeatureData, b: &FeatureData| f.join(a, b));
    let ctx = || format!("{} x={x} y={y} z={z}", f.name());
    check(m(x, y) == m(y, x), || format!("meet not commutative: {}", ctx()))?;
    check(j(x, y) == j(y, x), || format!("join not commutative: {}", ctx()))?;
    check(m(&m(x, y), z) == m(x, &m(y, z)), || format!("meet not associative: {}", ctx()))?;
    check(j(&j(x, y), z) == j(x, &j(y, z)), || format!("join not associative: {}", ctx()))?;
    check(m(x, x) == *x && j(x, x) == *x, || format!("not idempotent: {}", ctx()))?;
    check(j(x, &m(x, y)) == *x, || format!("join absorption fails: {}", ctx()))?;
    check(m(x, &j(x, y)) == *x, || format!("meet absorption fails: {}", ctx()))?;
    check(m(x, &FeatureData::Top) == *x && j(x, &FeatureData::bottom()) == *x, || format!("identity fails: {}", ctx()))?;
    let (dx, dy) = (denote(f, x), denote(f, y));
    let inter: BTreeSet<usize> = dx.intersection(&dy).copied().collect();
    let union: BTreeSet<usize> = dx.union(&dy).copied().collect();
    check(denote(f, &m(x, y)) == inter, || format!("meet is not intersection: {}", ctx()))?;
    check(denote(f, &j(x, y)) == union, || format!("join is not union: {}", ctx()))?;
    check(f.orthogonal(x, y) == inter.is_empty(), || format!("orthogonality disagrees: {}", ctx()))?;
    check(f.subtype(x, y) == dx.is_subset(&dy), || format!("subtype disagrees: {}", ctx()))?;
    check((dx == dy) == (x == y), || format!("canonical form not unique: {}", ctx()))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Acceptance criteria

pub fn criterion_1() -> Result<(), String> {
    let start = Instant::now();
    for (k, f) in [Feature::TopSymbol, Feature::HasSymbol, Feature::IsMatch, Feature::SymbAtPos]
        .into_iter()
        .enumerate()
    {
        let c = corpus(f, 1000, 0x5eed + k as u64);
        let n = c.len();
        for i in 0..n {
            lattice_laws(f, &c[i], &c[(i * 7 + 3) % n], &c[(i * 13 + 5) % n])?;
        }
    }
    check(start.elapsed() < Duration::from_secs(10), || format!("took {:?}", start.elapsed()))
}

pub fn c1_class() -> GoalClass {
    GoalClass::top("C1")
        .with(Feature::TopSymbol, Feature::TopSymbol.data([[sym(Op::Star)]]))
        .with(Feature::HasSymbol, Feature::HasSymbol.data([[sym(Op::Star), sym(Op::Wedge)], [vee(), sym(Op::Star)]]))
}

pub fn c2_class() -> GoalClass {
    c1_class()
        .relabel("C2")
        .with(Feature::TopSymbol, Feature::TopSymbol.data([[sym(Op::Wedge)]]))
}

pub fn c3_class() -> GoalClass {
    GoalClass::top("C3")
        .with(Feature::TopSymbol, Feature::TopSymbol.data([[sym(Op::Star)]]))
        .with(Feature::HasSymbol, Feature::HasSymbol.data([[sym(Op::Star), sym(Op::Wedge), vee()]]))
}

pub fn criterion_2() -> Result<(), String> {
    let (c1, c2, c3) = (c1_class(), c2_class(), c3_class());
    check(c2.orthogonal(&c3), || "C2 and C3 are not orthogonal".into())?;
    let j = c2.join(&c3);
    let top = Feature::TopSymbol.data([[sym(Op::Wedge)], [sym(Op::Star)]]);
    let has = Feature::HasSymbol.data([[sym(Op::Star), sym(Op::Wedge)], [vee(), sym(Op::Star)]]);
    check(j.get(Feature::TopSymbol) == &top, || format!("join top_symbol = {}", j.get(Feature::TopSymbol)))?;
    check(j.get(Feature::HasSymbol) == &has, || format!("join has_symbol = {}", j.get(Feature::HasSymbol)))?;
    check(j.features().count() == 2, || format!("join has extra features: {j}"))?;
    check(c3.subtype(&c1), || "C3 <: C1 does not hold".into())
}

fn timed_check(conj: &str, script: &str, code: i32) -> Result<(), String> {
    let start = Instant::now();
    let out = cmd_check(&theory_path(), conj, script);
    check(out.code == code, || format!("check {conj} {script}: exit {} ({})", out.code, out.stderr.trim()))?;
    check(start.elapsed() < Duration::from_secs(1), || format!("check {conj} {script} took {:?}", start.elapsed()))?;
    Ok(())
}

pub fn criterion_3() -> Result<(), String> {
    timed_check("conj1", "fig1", 0)?;
    let th = theory();
    check(trace(&th, "conj1", "fig1").root.len() == 9, || "conj1 replay is not 9 steps".into())?;
    timed_check("conj2", "short2", 0)?;
    check(trace(&th, "conj2", "short2").root.len() == 4, || "conj2 replay is not 4 steps".into())
}

pub fn criterion_4() -> Result<(), String> {
    timed_check("conj2", "fig1", 1)
}

pub fn criterion_5() -> Result<(), String> {
    let th = theory();
    let t = trace(&th, "conj1", "fig1");
    let gt1 = derive_goal_type(&t.root.state).map_err(|e| e.to_string())?;
    let h = GoalClass::top("H")
        .with(Feature::TopSymbol, Feature::TopSymbol.data([[sym(Op::Star)]]))
        .with(Feature::HasSymbol, Feature::HasSymbol.data([[sym(Op::Star), sym(Op::Wedge)]]));
    let p = GoalClass::top("P")
        .with(Feature::TopSymbol, Feature::TopSymbol.data([[sym(Op::Pure)]]))
        .with(Feature::HasSymbol, Feature::HasSymbol.data([[sym(Op::Pure)]]));
    check(gt1.fact("H") == Some(&h), || format!("GT1 H = {:?}", gt1.fact("H").map(|c| c.to_string())))?;
    check(gt1.fact("P") == Some(&p), || format!("GT1 P = {:?}", gt1.fact("P").map(|c| c.to_string())))?;
    let bot = Feature::SymbAtPos.data([[Datum::Bottom]]);
    let key = concl_h(Feature::SymbAtPos);
    check(gt1.link.get(&key) == &bot, || format!("GT1 symb_at_pos = {}", gt1.link.get(&key)))?;
    let g5 = &t.root.preorder()[4].state;
    let gt3 = derive_goal_type(g5).map_err(|e| e.to_string())?;
    let one = Feature::SymbAtPos.data([[pos(&[1])]]);
    check(gt3.link.get(&key) == &one, || format!("g5 symb_at_pos = {}", gt3.link.get(&key)))
}

fn looped_feedback(g: &StrategyGraph, n: stratgen::graph::NodeId) -> Option<GoalType> {
    let fb = g.feedback_wires(n);
    (fb.len() == 1).then(|| g.wire(fb[0]).unwrap().label.goal_type().unwrap().clone())
}

pub fn criterion_6() -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = cmd_generalise(&theory_path(), "conj1", "fig1", dir.path());
    check(out.code == 0, || format!("generalise exit {}: {}", out.code, out.stderr.trim()))?;
    let rules: Vec<&str> = out
        .stdout
        .lines()
        .filter(|l| l.starts_with("step-"))
        .filter_map(|l| l.split_whitespace().nth(1))
        .collect();
    let want = ["trace", "loop1", "loop2", "loop2", "layer", "pushout", "loop1"];
    check(rules == want, || format!("snapshot rules {rules:?}"))?;
    let text = std::fs::read_to_string(dir.path().join("strategy.strat")).map_err(|e| e.to_string())?;
    let g = parse_strategy(&text).map_err(|e| e.to_string())?;
    check(g.tactic_count() == 3, || format!("{} top-level nodes", g.tactic_count()))?;

    // Walk input -> first -> second -> third along the non-feedback wires.
    let mut order = Vec::new();
    let mut w = g.inputs()[0];
    while let Endpoint::Port(n, _) = g.wire(w).unwrap().dst {
        order.push(n);
        let exits = g.exit_wires(n);
        match exits.as_slice() {
            [next] => w = *next,
            _ => break,
        }
    }
    check(order.len() == 3, || format!("top level is not a chain of three: {order:?}"))?;
    let (a, b, c) = (order[0], order[1], order[2]);

    check(g.node(a) == Some(&StrategyNode::Atomic(TacticApp::subst(["ax1"]))), || "first node is not subst {ax1}".into())?;
    let fa = looped_feedback(&g, a).ok_or("subst {ax1} is not looped")?;
    let bot = Feature::SymbAtPos.data([[Datum::Bottom]]);
    check(fa.link.get(&concl_h(Feature::SymbAtPos)) == &bot, || format!("ax1 loop guard {fa}"))?;

    let Some(StrategyNode::Graph(gt)) = g.node(b) else {
        return Err("second node is not a graph tactic".into());
    };
    let body: Vec<String> = gt.children[0].nodes().map(|(_, n)| n.short_label()).collect();
    check(
        gt.children.len() == 1 && body == ["subst {ax2}", "rule class P"],
        || format!("graph tactic body {body:?} ({} children)", gt.children.len()),
    )?;
    let fb = looped_feedback(&g, b).ok_or("graph tactic is not looped")?;
    let f = Feature::IsMatch.data([[Datum::Bool(false)]]);
    check(fb.link.get(&concl_h(Feature::IsMatch)) == &f, || format!("pax2 loop guard {fb}"))?;

    check(g.node(c) == Some(&StrategyNode::Atomic(TacticApp::rule_class("H"))), || "third node is not rule class H".into())?;
    check(g.feedback_wires(c).is_empty(), || "rule class H is looped".into())
}

fn eval_file(strategy: &Path, conj: &str, steps: &[&str]) -> Result<(), String> {
    let start = Instant::now();
    let out = cmd_eval(&theory_path(), conj, strategy, EvalContext::DEFAULT_BUDGET);
    let elapsed = start.elapsed();
    check(out.code == 0, || format!("eval {conj}: exit {} ({})", out.code, out.stderr.trim()))?;
    let th = theory();
    let g = parse_strategy(&std::fs::read_to_string(strategy).unwrap()).unwrap();
    let got: Vec<String> = run(&th, &g, conj).transcript.iter().map(|t| t.tactic.to_string()).collect();
    check(got == steps, || format!("eval {conj} transcript {got:?}"))?;
    check(elapsed < Duration::from_secs(1), || format!("eval {conj} took {elapsed:?}"))
}

pub fn criterion_7() -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = cmd_generalise(&theory_path(), "conj1", "fig1", dir.path());
    check(out.code == 0, || out.stderr.clone())?;
    let file = dir.path().join("strategy.strat");
    eval_file(&file, "conj2", &["subst {ax1}", "subst {ax2}", "rule class P", "rule class H"])?;
    let ax1 = "subst {ax1}";
    let pax2 = ["subst {ax2}", "rule class P"];
    let mut nine = vec![ax1; 4];
    nine.extend(pax2);
    nine.extend(pax2);
    nine.push("rule class H");
    eval_file(&file, "conj1", &nine)
}

pub fn criterion_8() -> Result<(), String> {
    let th = theory();
    for (i, s) in snapshots(&th).iter().enumerate() {
        let r = run(&th, &s.graph, "conj1");
        check(r.status == stratgen::graph::EvalStatus::Proved, || format!("snapshot {i} ({}) does not prove conj1", s.rule))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Partition uniqueness

pub fn atom_term() -> impl Strategy<Value = Term> {
    prop::sample::select(vec!["a", "b", "c", "d", "e", "f"]).prop_map(Term::atom)
}

pub fn ground_term() -> impl Strategy<Value = Term> {
    atom_term().prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            3 => (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::star(a, b)),
            2 => (inner.clone(), inner).prop_map(|(a, b)| Term::wedge(a, b)),
        ]
    })
}

pub fn tactic() -> impl Strategy<Value = TacticApp> {
    prop::sample::select(vec![
        TacticApp::subst(["ax1"]),
        TacticApp::subst(["ax2"]),
        TacticApp::subst(["ax1", "ax2"]),
        TacticApp::rule_class("P"),
        TacticApp::rule_class("H"),
    ])
}

/// One hypothesis set, a goal and some extra conclusions under it.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub hyps: BTreeMap<String, Term>,
    pub goal: Term,
    pub others: Vec<Term>,
    pub tactic: TacticApp,
    pub picks: Vec<(usize, usize)>,
}

pub fn scenario() -> impl Strategy<Value = Scenario> {
    (
        atom_term(),
        ground_term(),
        ground_term(),
        prop::collection::vec(ground_term(), 0..4),
        tactic(),
        prop::collection::vec((0usize..16, 0usize..16), 0..6),
        any::<bool>(),
    )
        .prop_map(|(p, h, goal, others, tactic, picks, wedge_goal)| {
            // Bias some goals towards ax2 redexes so both outputs occur.
            let goal = if wedge_goal {
                Term::star(Term::wedge(goal, p.clone()), Term::atom("a"))
            } else {
                goal
            };
            let hyps = BTreeMap::from([("p".to_string(), Term::pure(p)), ("h".to_string(), h)]);
            Scenario { hyps, goal, others, tactic, picks }
        })
}

/// Output labels for a scenario: derived types of the tactic's actual
/// results and of the extra conclusions, some widened by `gen`, filtered
/// greedily to a pairwise orthogonal list.
pub fn scenario_labels(th: &Theory, s: &Scenario) -> Option<(ProofState, GoalType, Vec<GoalType>)> {
    let ps = ProofState::new(s.hyps.clone(), s.goal.clone());
    let alpha = derive_goal_type(&ps).ok()?;
    let classes = |label: &str| stratgen::kernel::resolve_role(&ps, label);
    let mut states: Vec<ProofState> = th
        .run_tactic(&s.tactic, &ps, &classes)
        .ok()?
        .into_iter()
        .flatten()
        .collect();
    states.extend(s.others.iter().map(|t| ProofState::new(s.hyps.clone(), t.clone())));
    let mut pool: Vec<GoalType> = states.iter().filter_map(|st| derive_goal_type(st).ok()).collect();
    if pool.is_empty() {
        return Some((ps, alpha, Vec::new()));
    }
    for &(i, j) in &s.picks {
        let (x, y) = (&pool[i % pool.len()], &pool[j % pool.len()]);
        if let Ok(g) = x.gen(y) {
            pool.push(g);
        }
    }
    let mut betas: Vec<GoalType> = Vec::new();
    for t in pool {
        if betas.iter().all(|b| b.orthogonal(&t)) {
            betas.push(t);
        }
    }
    Some((ps, alpha, betas))
}

/// Runs the partition-uniqueness property; returns how many cases routed at
/// least one goal.
pub fn partition_uniqueness(cases: u32) -> Result<usize, String> {
    let th = theory();
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        rng_algorithm: proptest::test_runner::RngAlgorithm::ChaCha,
        ..Config::default()
    });
    let routed = std::cell::Cell::new(0usize);
    runner
        .run(&scenario(), |s| {
            let Some((ps, alpha, betas)) = scenario_labels(&th, &s) else { return Ok(()) };
            for (i, a) in betas.iter().enumerate() {
                for b in &betas[i + 1..] {
                    prop_assert!(a.orthogonal(b));
                }
            }
            let goal = initial_goal(ps, &alpha).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let alts = lift_tactic(&th, &s.tactic, &alpha, &betas, &goal).map_err(|e| TestCaseError::fail(e.to_string()))?;
            for parts in &alts {
                prop_assert!(parts.len() <= 1, "{} partitions for one alternative of {}", parts.len(), s.tactic);
                if parts.iter().any(|p| p.iter().any(|l| !l.is_empty())) {
                    routed.set(routed.get() + 1);
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(routed.get())
}

pub fn criterion_9() -> Result<(), String> {
    let routed = partition_uniqueness(400)?;
    check(routed >= 20, || format!("only {routed} cases routed any goal; property is vacuous"))
}
