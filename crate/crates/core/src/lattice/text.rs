//! Text syntax for feature data, classes and goal types.
//!
//! ```text
//! data  := top | bot | [ ( [ datum,* ] ),* ]
//! class := { (feature: data),* }
//! gt    := gt { concl: class, facts: { (LABEL: class),* }, link: { (feature(REF,REF): data),* } }
//! ```

use thiserror::Error;

use super::class::GoalClass;
use super::feature::{Datum, Feature, FeatureData};
use super::goal_type::{GoalType, LatticeError};
use super::link::{ClassRef, Link, LinkKey};
use crate::lexer::{Cursor, SyntaxError, Tok};
use crate::term::{parse_term, Op, Position, Symbol, TermError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

pub fn parse_datum(cur: &mut Cursor) -> Result<Datum, TextError> {
    let d = match cur.next() {
        Some(Tok::Ident(s)) => match s.as_str() {
            "bot" => Datum::Bottom,
            "true" => Datum::Bool(true),
            "false" => Datum::Bool(false),
            "root" => Datum::Position(Position::root()),
            "pure" => Datum::Symbol(Symbol::Op(Op::Pure)),
            _ => Datum::Symbol(Symbol::Name(s)),
        },
        Some(Tok::Star) => Datum::Symbol(Symbol::Op(Op::Star)),
        Some(Tok::Wedge) => Datum::Symbol(Symbol::Op(Op::Wedge)),
        Some(Tok::Vee) => Datum::Symbol(Symbol::Name("\\/".into())),
        Some(Tok::Hash) => {
            let neg = cur.eat(&Tok::Minus);
            let n = cur.int()? as i64;
            Datum::Int(if neg { -n } else { n })
        }
        Some(Tok::Int(n)) => {
            let mut p = vec![n as usize];
            while cur.eat(&Tok::Dot) {
                p.push(cur.int()? as usize);
            }
            Datum::Position(Position(p))
        }
        Some(Tok::Quoted(s)) => Datum::Term(parse_term(&s, None)?),
        _ => return Err(cur.error("expected a datum").into()),
    };
    Ok(d)
}

pub fn parse_feature_data(cur: &mut Cursor, feature: Feature) -> Result<FeatureData, TextError> {
    if cur.eat_keyword("top") {
        return Ok(FeatureData::Top);
    }
    if cur.eat_keyword("bot") {
        return Ok(FeatureData::bottom());
    }
    cur.expect(&Tok::LBracket)?;
    let mut lists: Vec<Vec<Datum>> = Vec::new();
    if !cur.eat(&Tok::RBracket) {
        loop {
            cur.expect(&Tok::LBracket)?;
            let mut conj = Vec::new();
            if !cur.eat(&Tok::RBracket) {
                loop {
                    conj.push(parse_datum(cur)?);
                    if cur.eat(&Tok::RBracket) {
                        break;
                    }
                    cur.expect(&Tok::Comma)?;
                }
            }
            lists.push(conj);
            if cur.eat(&Tok::RBracket) {
                break;
            }
            cur.expect(&Tok::Comma)?;
        }
    }
    Ok(feature.data(lists))
}

fn parse_feature_name(cur: &mut Cursor) -> Result<Feature, TextError> {
    let name = cur.ident()?;
    Feature::from_name(&name).ok_or_else(|| cur.error(format!("unknown feature `{name}`")).into())
}

fn comma_list<T>(
    cur: &mut Cursor,
    open: Tok,
    close: Tok,
    mut item: impl FnMut(&mut Cursor) -> Result<T, TextError>,
) -> Result<Vec<T>, TextError> {
    cur.expect(&open)?;
    let mut out = Vec::new();
    if cur.eat(&close) {
        return Ok(out);
    }
    loop {
        out.push(item(cur)?);
        if cur.eat(&close) {
            return Ok(out);
        }
        cur.expect(&Tok::Comma)?;
    }
}

pub fn parse_class_body(cur: &mut Cursor, label: &str) -> Result<GoalClass, TextError> {
    let entries = comma_list(cur, Tok::LBrace, Tok::RBrace, |cur| {
        let f = parse_feature_name(cur)?;
        if f.is_link() {
            return Err(cur.error(format!("{} is a link feature", f.name())).into());
        }
        cur.expect(&Tok::Colon)?;
        Ok((f, parse_feature_data(cur, f)?))
    })?;
    let mut c = GoalClass::top(label);
    for (f, d) in entries {
        c.set(f, d);
    }
    Ok(c)
}

/// `LABEL`, `LABEL {..}` or `{..}`; a bare label is the top class.
pub fn parse_class_expr(cur: &mut Cursor) -> Result<GoalClass, TextError> {
    let label = match cur.peek() {
        Some(Tok::Ident(_)) => cur.ident()?,
        _ => "C".to_string(),
    };
    if cur.peek() == Some(&Tok::LBrace) {
        parse_class_body(cur, &label)
    } else {
        Ok(GoalClass::top(&label))
    }
}

fn parse_label(cur: &mut Cursor) -> Result<String, TextError> {
    let mut label = cur.ident()?;
    while cur.eat(&Tok::Pipe) {
        label.push('|');
        label.push_str(&cur.ident()?);
    }
    Ok(label)
}

fn parse_ref(cur: &mut Cursor) -> Result<ClassRef, TextError> {
    let l = parse_label(cur)?;
    Ok(if l == "concl" { ClassRef::Concl } else { ClassRef::Fact(l) })
}

pub fn parse_goal_type_from(cur: &mut Cursor) -> Result<GoalType, TextError> {
    cur.expect_keyword("gt")?;
    cur.expect(&Tok::LBrace)?;
    let mut concl = GoalClass::top("concl");
    let mut facts = Vec::new();
    let mut link = Link::new();
    if !cur.eat(&Tok::RBrace) {
        loop {
            let field = cur.ident()?;
            cur.expect(&Tok::Colon)?;
            match field.as_str() {
                "concl" => concl = parse_class_body(cur, "concl")?,
                "facts" => {
                    facts = comma_list(cur, Tok::LBrace, Tok::RBrace, |cur| {
                        let label = parse_label(cur)?;
                        cur.expect(&Tok::Colon)?;
                        parse_class_body(cur, &label)
                    })?;
                }
                "link" => {
                    let entries = comma_list(cur, Tok::LBrace, Tok::RBrace, |cur| {
                        let f = parse_feature_name(cur)?;
                        if !f.is_link() {
                            return Err(cur.error(format!("{} is a class feature", f.name())).into());
                        }
                        cur.expect(&Tok::LParen)?;
                        let left = parse_ref(cur)?;
                        cur.expect(&Tok::Comma)?;
                        let right = parse_ref(cur)?;
                        cur.expect(&Tok::RParen)?;
                        cur.expect(&Tok::Colon)?;
                        Ok((LinkKey::new(f, left, right), parse_feature_data(cur, f)?))
                    })?;
                    for (k, d) in entries {
                        link.set(k, d);
                    }
                }
                other => return Err(cur.error(format!("unknown goal-type field `{other}`")).into()),
            }
            if cur.eat(&Tok::RBrace) {
                break;
            }
            cur.expect(&Tok::Comma)?;
        }
    }
    Ok(GoalType::new(concl, facts, link)?)
}

pub fn parse_goal_type(src: &str) -> Result<GoalType, TextError> {
    let mut cur = Cursor::new(src)?;
    let g = parse_goal_type_from(&mut cur)?;
    cur.finish()?;
    Ok(g)
}

pub fn parse_class(src: &str) -> Result<GoalClass, TextError> {
    let mut cur = Cursor::new(src)?;
    let c = parse_class_expr(&mut cur)?;
    cur.finish()?;
    Ok(c)
}

pub fn parse_data(feature: Feature, src: &str) -> Result<FeatureData, TextError> {
    let mut cur = Cursor::new(src)?;
    let d = parse_feature_data(&mut cur, feature)?;
    cur.finish()?;
    Ok(d)
}
