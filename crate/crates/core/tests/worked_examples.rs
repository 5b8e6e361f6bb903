mod common;

use common::*;
use stratgen::generalise::derive_goal_type;
use stratgen::graph::initial_goal;
use stratgen::lattice::text::{parse_class, parse_goal_type};
use stratgen::lattice::{goal_has_type, Datum, Feature, GoalClass};
use stratgen::term::Op;

#[test]
fn worked_class_examples() {
    criterion_2().unwrap();
}

#[test]
fn classes_parse_from_their_printed_form() {
    let c1 = parse_class(r"C1 {top_symbol: [[*]], has_symbol: [[*,/\],[\/,*]]}").unwrap();
    assert!(c1.same_features(&c1_class()));
    let printed = c3_class().to_string();
    assert!(parse_class(&printed).unwrap().same_features(&c3_class()));
}

#[test]
fn c1_is_not_below_c3() {
    assert!(!c1_class().subtype(&c3_class()));
    assert!(c3_class().subtype(&c1_class()));
}

#[test]
fn has_symbol_meet_of_c1_and_c3() {
    let f = Feature::HasSymbol;
    let m = f.meet(c1_class().get(f), c3_class().get(f));
    assert_eq!(&m, c3_class().get(f));
    assert_eq!(m, f.data([[sym(Op::Star), sym(Op::Wedge), vee()]]));
}

#[test]
fn c2_meet_c3_has_bottom_top_symbol() {
    let m = c2_class().meet(&c3_class());
    assert!(m.get(Feature::TopSymbol).is_bottom());
}

#[test]
fn first_conjecture_types() {
    criterion_5().unwrap();
}

#[test]
fn first_conjecture_conclusion_class() {
    let th = theory();
    let gt1 = derive_goal_type(&th.conjectures["conj1"].initial_state()).unwrap();
    let g = GoalClass::top("concl")
        .with(Feature::TopSymbol, Feature::TopSymbol.data([[sym(Op::Star)]]))
        .with(Feature::HasSymbol, Feature::HasSymbol.data([[sym(Op::Star), sym(Op::Wedge)]]));
    assert!(gt1.concl.same_features(&g));
    assert_eq!(gt1.facts().count(), 2);
}

#[test]
fn second_conjecture_fits_first_type() {
    let th = theory();
    let gt1 = derive_goal_type(&th.conjectures["conj1"].initial_state()).unwrap();
    let g = initial_goal(th.conjectures["conj2"].initial_state(), &gt1).unwrap();
    assert!(goal_has_type(&g, &gt1));
    assert!(g.fmap["P"].contains(&stratgen::term::parse_ground_term("pure(d)", None).unwrap()));
}

#[test]
fn loop_feedback_and_exit_types_are_orthogonal() {
    let th = theory();
    let g = mutation_strategy(&th);
    let ax1 = g.preorder()[0];
    let fb = g.wire(g.feedback_wires(ax1)[0]).unwrap().label.goal_type().unwrap();
    let exit = g.wire(g.exit_wires(ax1)[0]).unwrap().label.goal_type().unwrap();
    assert!(fb.orthogonal(exit));
    assert_eq!(exit.link.get(&concl_h(Feature::SymbAtPos)), &Feature::SymbAtPos.data([[pos(&[1])]]));
    // The feedback type is the initial goal's type.
    let gt1 = derive_goal_type(&th.conjectures["conj1"].initial_state()).unwrap();
    assert_eq!(fb, &gt1);
}

#[test]
fn gen_of_equal_types_is_identity() {
    let th = theory();
    let gt1 = derive_goal_type(&th.conjectures["conj1"].initial_state()).unwrap();
    assert_eq!(gt1.gen(&gt1).unwrap(), gt1);
}

#[test]
fn goal_types_with_orthogonal_conclusions_are_orthogonal() {
    let a = parse_goal_type(r"gt {concl: {top_symbol: [[/\]]}, facts: {H: {top_symbol: [[*]]}}, link: {}}").unwrap();
    let b = parse_goal_type(r"gt {concl: {top_symbol: [[*]]}, facts: {H: {top_symbol: [[*]]}}, link: {}}").unwrap();
    assert!(a.orthogonal(&b));
    assert!(!a.subtype(&b));
    let c = parse_goal_type(r"gt {concl: {top_symbol: [[*]]}, facts: {H: {}}, link: {is_match(concl,H): [[true]]}}").unwrap();
    let d = parse_goal_type(r"gt {concl: {top_symbol: [[*]]}, facts: {H: {}}, link: {is_match(concl,H): [[false]]}}").unwrap();
    assert!(c.orthogonal(&d));
    let e = parse_goal_type(r"gt {concl: {top_symbol: [[*]]}, facts: {H: {}}, link: {}}").unwrap();
    assert!(c.subtype(&e) && !e.subtype(&c));
    assert!(parse_goal_type(r"gt {concl: {}, facts: {}, link: {is_match(concl,H): [[true]]}}").is_err());
    assert_eq!(Feature::IsMatch.data([[Datum::Bool(true)]]).to_string(), "[[true]]");
}
