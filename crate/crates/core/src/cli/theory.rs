//! Theory files.
//!
//! ```text
//! atoms a b c
//! axiom ax1: (A * B) * C <-> A * (B * C)
//! axiom ax2: pure(B) ==> (A /\ B) * C <-> (A * C) /\ B
//! conjecture c1: assumes p: pure(e) and h: ... shows ...
//! script s1 for c1: subst {ax1}; rule p; rule class H
//! ```
//! Lines starting with `#` are comments.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::kernel::{Conjecture, Equation, KernelError, Script, TacticApp, TacticArg, TacticKind, Theory};
use crate::lexer::{strip_comments, Cursor, SyntaxError, Tok};
use crate::term::{parse_term_from, TermError};

const KEYWORDS: [&str; 8] = ["atoms", "axiom", "conjecture", "script", "assumes", "shows", "and", "pure"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("`{0}` is declared twice")]
    Duplicate(String),
    #[error("`{0}` is a keyword")]
    Keyword(String),
    #[error("script `{script}` refers to unknown conjecture `{conjecture}`")]
    UnknownConjecture { script: String, conjecture: String },
    #[error("script `{script}` refers to unknown axiom `{name}`")]
    UnknownAxiom { script: String, name: String },
    #[error("script `{script}` refers to unknown hypothesis `{name}`")]
    UnknownHypothesis { script: String, name: String },
    #[error("hypothesis `{0}` is not ground")]
    NotGround(String),
}

pub fn parse_theory(src: &str) -> Result<Theory, TheoryError> {
    let mut cur = Cursor::new(&strip_comments(src))?;
    let mut th = Theory::default();
    let mut declared: BTreeSet<String> = BTreeSet::new();
    let mut declare = |name: &str| -> Result<(), TheoryError> {
        if !declared.insert(name.to_string()) {
            return Err(TheoryError::Duplicate(name.to_string()));
        }
        Ok(())
    };
    while !cur.at_end() {
        let kw = cur.ident()?;
        match kw.as_str() {
            "atoms" => {
                while let Some(Tok::Ident(name)) = cur.peek().cloned() {
                    if ["axiom", "conjecture", "script", "atoms"].contains(&name.as_str()) {
                        break;
                    }
                    cur.next();
                    if KEYWORDS.contains(&name.as_str()) {
                        return Err(TheoryError::Keyword(name));
                    }
                    th.alphabet.insert(name);
                }
            }
            "axiom" => {
                let name = cur.ident()?;
                declare(&name)?;
                cur.expect(&Tok::Colon)?;
                let first = parse_term_from(&mut cur, Some(&th.alphabet))?;
                let (condition, lhs) = if cur.eat(&Tok::Implies) {
                    (Some(first), parse_term_from(&mut cur, Some(&th.alphabet))?)
                } else {
                    (None, first)
                };
                cur.expect(&Tok::Iff)?;
                let rhs = parse_term_from(&mut cur, Some(&th.alphabet))?;
                th.axioms.insert(name.clone(), Equation::new(&name, condition, lhs, rhs)?);
            }
            "conjecture" => {
                let name = cur.ident()?;
                declare(&name)?;
                cur.expect(&Tok::Colon)?;
                let mut hyps = Vec::new();
                if cur.eat_keyword("assumes") {
                    loop {
                        let h = cur.ident()?;
                        cur.expect(&Tok::Colon)?;
                        let t = parse_term_from(&mut cur, Some(&th.alphabet))?;
                        if !t.is_ground() {
                            return Err(TheoryError::NotGround(h));
                        }
                        if hyps.iter().any(|(n, _)| n == &h) {
                            return Err(TheoryError::Duplicate(h));
                        }
                        hyps.push((h, t));
                        if !cur.eat_keyword("and") {
                            break;
                        }
                    }
                }
                cur.expect_keyword("shows")?;
                let concl = parse_term_from(&mut cur, Some(&th.alphabet))?;
                if !concl.is_ground() {
                    return Err(TheoryError::NotGround(name));
                }
                th.conjectures.insert(name.clone(), Conjecture { name, hyps, concl });
            }
            "script" => {
                let name = cur.ident()?;
                declare(&name)?;
                cur.expect_keyword("for")?;
                let conjecture = cur.ident()?;
                cur.expect(&Tok::Colon)?;
                let mut tactics = vec![parse_tactic(&mut cur)?];
                while cur.eat(&Tok::Semi) {
                    tactics.push(parse_tactic(&mut cur)?);
                }
                let script = Script {
                    name: name.clone(),
                    conjecture,
                    tactics,
                };
                check_script(&th, &script)?;
                th.scripts.insert(name, script);
            }
            other => return Err(cur.error(format!("unknown declaration `{other}`")).into()),
        }
    }
    Ok(th)
}

fn name_set(cur: &mut Cursor) -> Result<BTreeSet<String>, SyntaxError> {
    let mut names = BTreeSet::new();
    if cur.eat(&Tok::LBrace) {
        loop {
            names.insert(cur.ident()?);
            if cur.eat(&Tok::RBrace) {
                break;
            }
            cur.expect(&Tok::Comma)?;
        }
    } else {
        names.insert(cur.ident()?);
    }
    Ok(names)
}

/// `subst NAMES`, `rule NAMES` or `rule class LABEL`; NAMES is one name or `{a, b}`.
pub fn parse_tactic(cur: &mut Cursor) -> Result<TacticApp, SyntaxError> {
    let kw = cur.ident()?;
    match kw.as_str() {
        "subst" => Ok(TacticApp {
            kind: TacticKind::Subst,
            arg: TacticArg::Names(name_set(cur)?),
        }),
        "rule" => {
            if cur.eat_keyword("class") {
                let mut label = cur.ident()?;
                while cur.eat(&Tok::Pipe) {
                    label.push('|');
                    label.push_str(&cur.ident()?);
                }
                return Ok(TacticApp::rule_class(&label));
            }
            Ok(TacticApp {
                kind: TacticKind::Rule,
                arg: TacticArg::Names(name_set(cur)?),
            })
        }
        other => Err(cur.error(format!("unknown tactic `{other}`"))),
    }
}

fn check_script(th: &Theory, script: &Script) -> Result<(), TheoryError> {
    let conj = th
        .conjectures
        .get(&script.conjecture)
        .ok_or_else(|| TheoryError::UnknownConjecture {
            script: script.name.clone(),
            conjecture: script.conjecture.clone(),
        })?;
    let hyps: BTreeMap<&str, ()> = conj.hyps.iter().map(|(n, _)| (n.as_str(), ())).collect();
    for tac in &script.tactics {
        let TacticArg::Names(names) = &tac.arg else { continue };
        for n in names {
            let known = match tac.kind {
                TacticKind::Subst => th.axioms.contains_key(n),
                TacticKind::Rule => hyps.contains_key(n.as_str()),
            };
            if !known {
                let (script, name) = (script.name.clone(), n.clone());
                return Err(match tac.kind {
                    TacticKind::Subst => TheoryError::UnknownAxiom { script, name },
                    TacticKind::Rule => TheoryError::UnknownHypothesis { script, name },
                });
            }
        }
    }
    Ok(())
}
