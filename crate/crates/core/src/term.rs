//! Terms over `*`, `/\` and `pure`, with positions, matching and rewriting helpers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::lexer::{Cursor, SyntaxError, Tok};

/// Operator symbols. The declaration order is the canonical symbol order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Op {
    Wedge,
    Star,
    Pure,
}

impl Op {
    pub fn arity(self) -> usize {
        match self {
            Op::Wedge | Op::Star => 2,
            Op::Pure => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Op::Wedge => "/\\",
            Op::Star => "*",
            Op::Pure => "pure",
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A symbol as seen by the symbol features: an operator or a named atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Op(Op),
    Name(String),
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Op(op) => write!(f, "{op}"),
            Symbol::Name(n) => f.write_str(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Atom(String),
    /// Metavariable, only in equation patterns.
    Var(String),
    App(Op, Vec<Term>),
}

/// 1-based child-index path; the root is the empty path.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn child(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        v.push(i);
        Position(v)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

pub type Substitution = BTreeMap<String, Term>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("unknown symbol `{name}` at offset {offset}")]
    UnknownSymbol { name: String, offset: usize },
    #[error("metavariable `{0}` in a ground term")]
    UnexpectedVar(String),
}

impl Term {
    pub fn atom(name: &str) -> Term {
        Term::Atom(name.to_string())
    }

    pub fn star(a: Term, b: Term) -> Term {
        Term::App(Op::Star, vec![a, b])
    }

    pub fn wedge(a: Term, b: Term) -> Term {
        Term::App(Op::Wedge, vec![a, b])
    }

    pub fn pure(a: Term) -> Term {
        Term::App(Op::Pure, vec![a])
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Atom(_) => true,
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Atom(_) => {}
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn subterm_at(&self, pos: &Position) -> Option<&Term> {
        let mut t = self;
        for &i in &pos.0 {
            match t {
                Term::App(_, args) if i >= 1 && i <= args.len() => t = &args[i - 1],
                _ => return None,
            }
        }
        Some(t)
    }

    pub fn replace_at(&self, pos: &Position, new: Term) -> Option<Term> {
        fn go(t: &Term, path: &[usize], new: Term) -> Option<Term> {
            let Some((&i, rest)) = path.split_first() else {
                return Some(new);
            };
            match t {
                Term::App(op, args) if i >= 1 && i <= args.len() => {
                    let mut args = args.clone();
                    args[i - 1] = go(&args[i - 1], rest, new)?;
                    Some(Term::App(*op, args))
                }
                _ => None,
            }
        }
        go(self, &pos.0, new)
    }

    /// All positions, children before parents, left before right.
    pub fn positions_postorder(&self) -> Vec<Position> {
        fn go(t: &Term, here: Position, out: &mut Vec<Position>) {
            if let Term::App(_, args) = t {
                for (i, a) in args.iter().enumerate() {
                    go(a, here.child(i + 1), out);
                }
            }
            out.push(here);
        }
        let mut out = Vec::new();
        go(self, Position::root(), &mut out);
        out
    }

    pub fn leaf_positions(&self) -> BTreeMap<Position, String> {
        fn go(t: &Term, here: Position, out: &mut BTreeMap<Position, String>) {
            match t {
                Term::Atom(a) => {
                    out.insert(here, a.clone());
                }
                Term::Var(_) => {}
                Term::App(_, args) => {
                    for (i, a) in args.iter().enumerate() {
                        go(a, here.child(i + 1), out);
                    }
                }
            }
        }
        let mut out = BTreeMap::new();
        go(self, Position::root(), &mut out);
        out
    }

    pub fn operator_symbols(&self) -> BTreeSet<Op> {
        fn go(t: &Term, out: &mut BTreeSet<Op>) {
            if let Term::App(op, args) = t {
                out.insert(*op);
                args.iter().for_each(|a| go(a, out));
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut out);
        out
    }

    pub fn top_symbol(&self) -> Symbol {
        match self {
            Term::Atom(a) | Term::Var(a) => Symbol::Name(a.clone()),
            Term::App(op, _) => Symbol::Op(*op),
        }
    }

    pub fn apply(&self, sigma: &Substitution) -> Term {
        match self {
            Term::Var(v) => sigma.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::Atom(_) => self.clone(),
            Term::App(op, args) => Term::App(*op, args.iter().map(|a| a.apply(sigma)).collect()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            _ => 1,
        }
    }
}

/// Syntactic matching of `pattern` against `t`.
pub fn match_term(pattern: &Term, t: &Term) -> Option<Substitution> {
    fn go(p: &Term, t: &Term, sigma: &mut Substitution) -> bool {
        match (p, t) {
            (Term::Var(v), _) => match sigma.get(v) {
                Some(bound) => bound == t,
                None => {
                    sigma.insert(v.clone(), t.clone());
                    true
                }
            },
            (Term::Atom(a), Term::Atom(b)) => a == b,
            (Term::App(o1, a1), Term::App(o2, a2)) => {
                o1 == o2 && a1.len() == a2.len() && a1.iter().zip(a2).all(|(x, y)| go(x, y, sigma))
            }
            _ => false,
        }
    }
    let mut sigma = Substitution::new();
    go(pattern, t, &mut sigma).then_some(sigma)
}

/// Positions where both terms carry the same atom.
pub fn shared_leaf_positions(a: &Term, b: &Term) -> BTreeSet<Position> {
    let lb = b.leaf_positions();
    a.leaf_positions()
        .into_iter()
        .filter(|(p, x)| lb.get(p) == Some(x))
        .map(|(p, _)| p)
        .collect()
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Precedence: 0 = wedge level, 1 = star level, 2 = atomic.
        fn prec(t: &Term) -> u8 {
            match t {
                Term::App(Op::Wedge, _) => 0,
                Term::App(Op::Star, _) => 1,
                _ => 2,
            }
        }
        fn go(t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t {
                Term::Atom(a) | Term::Var(a) => f.write_str(a),
                Term::App(Op::Pure, args) => {
                    f.write_str("pure(")?;
                    go(&args[0], f)?;
                    f.write_str(")")
                }
                Term::App(op, args) => {
                    let me = prec(t);
                    // Both operators associate to the right.
                    wrap(&args[0], prec(&args[0]) <= me, f)?;
                    write!(f, " {op} ")?;
                    wrap(&args[1], prec(&args[1]) < me, f)
                }
            }
        }
        fn wrap(t: &Term, parens: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if parens {
                f.write_str("(")?;
                go(t, f)?;
                f.write_str(")")
            } else {
                go(t, f)
            }
        }
        go(self, f)
    }
}

/// Parses a term. Lower-case names must be in `alphabet` when one is given;
/// upper-case names are metavariables.
pub fn parse_term(src: &str, alphabet: Option<&BTreeSet<String>>) -> Result<Term, TermError> {
    let mut cur = Cursor::new(src)?;
    let t = parse_term_from(&mut cur, alphabet)?;
    cur.finish()?;
    Ok(t)
}

pub fn parse_ground_term(src: &str, alphabet: Option<&BTreeSet<String>>) -> Result<Term, TermError> {
    let t = parse_term(src, alphabet)?;
    if let Some(v) = t.vars().into_iter().next() {
        return Err(TermError::UnexpectedVar(v));
    }
    Ok(t)
}

pub fn parse_term_from(cur: &mut Cursor, alphabet: Option<&BTreeSet<String>>) -> Result<Term, TermError> {
    let left = parse_star(cur, alphabet)?;
    if cur.eat(&Tok::Wedge) {
        let right = parse_term_from(cur, alphabet)?;
        return Ok(Term::wedge(left, right));
    }
    Ok(left)
}

fn parse_star(cur: &mut Cursor, alphabet: Option<&BTreeSet<String>>) -> Result<Term, TermError> {
    let left = parse_atomic(cur, alphabet)?;
    if cur.eat(&Tok::Star) {
        let right = parse_star(cur, alphabet)?;
        return Ok(Term::star(left, right));
    }
    Ok(left)
}

fn parse_atomic(cur: &mut Cursor, alphabet: Option<&BTreeSet<String>>) -> Result<Term, TermError> {
    let offset = cur.offset();
    match cur.peek().cloned() {
        Some(Tok::LParen) => {
            cur.next();
            let t = parse_term_from(cur, alphabet)?;
            cur.expect(&Tok::RParen)?;
            Ok(t)
        }
        Some(Tok::Ident(name)) if name == "pure" => {
            cur.next();
            cur.expect(&Tok::LParen)?;
            let t = parse_term_from(cur, alphabet)?;
            cur.expect(&Tok::RParen)?;
            Ok(Term::pure(t))
        }
        Some(Tok::Ident(name)) => {
            cur.next();
            if name.starts_with(|c: char| c.is_ascii_uppercase()) {
                return Ok(Term::Var(name));
            }
            if let Some(alpha) = alphabet {
                if !alpha.contains(&name) {
                    return Err(TermError::UnknownSymbol { name, offset });
                }
            }
            Ok(Term::Atom(name))
        }
        _ => Err(cur.unexpected("term").into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Term {
        parse_term(s, None).unwrap()
    }

    #[test]
    fn star_binds_tighter_than_wedge() {
        assert_eq!(
            t("a * b /\\ c"),
            Term::wedge(Term::star(Term::atom("a"), Term::atom("b")), Term::atom("c"))
        );
    }

    #[test]
    fn operators_associate_right() {
        assert_eq!(
            t("a * b * c"),
            Term::star(Term::atom("a"), Term::star(Term::atom("b"), Term::atom("c")))
        );
    }

    #[test]
    fn printing_uses_minimal_parentheses() {
        assert_eq!(t("(a * b) * c").to_string(), "(a * b) * c");
        assert_eq!(t("a * (b * c)").to_string(), "a * b * c");
        assert_eq!(t("(a /\\ b) * c").to_string(), "(a /\\ b) * c");
        assert_eq!(t("pure((a))").to_string(), "pure(a)");
    }

    #[test]
    fn unknown_atom_is_reported() {
        let alpha: BTreeSet<String> = ["a".to_string()].into();
        assert!(matches!(
            parse_term("a * z", Some(&alpha)),
            Err(TermError::UnknownSymbol { name, .. }) if name == "z"
        ));
        assert!(matches!(parse_term("a *", None), Err(TermError::Syntax(_))));
    }

    #[test]
    fn positions_are_one_based() {
        let g = t("(a * b) * c");
        assert_eq!(g.subterm_at(&Position(vec![1, 2])), Some(&Term::atom("b")));
        assert_eq!(g.subterm_at(&Position(vec![3])), None);
        let r = g.replace_at(&Position(vec![2]), Term::atom("d")).unwrap();
        assert_eq!(r, t("(a * b) * d"));
    }

    #[test]
    fn postorder_visits_children_first() {
        let ps = t("(a * b) * c").positions_postorder();
        let shown: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
        assert_eq!(shown, ["1.1", "1.2", "1", "2", "root"]);
    }

    #[test]
    fn matching_respects_repeated_variables() {
        assert!(match_term(&t("X * X"), &t("a * a")).is_some());
        assert!(match_term(&t("X * X"), &t("a * b")).is_none());
        let s = match_term(&t("(A * B) * C"), &t("(a * b) * c")).unwrap();
        assert_eq!(s["B"], t("b"));
    }

    #[test]
    fn symbol_queries() {
        let g = t("pure(a) * (b /\\ c)");
        assert_eq!(g.top_symbol(), Symbol::Op(Op::Star));
        assert_eq!(g.operator_symbols(), [Op::Wedge, Op::Star, Op::Pure].into());
        assert_eq!(g.leaf_positions().len(), 3);
    }

    #[test]
    fn shared_leaves_compare_atoms_at_equal_positions() {
        let s = shared_leaf_positions(&t("c * (x * a)"), &t("c * (y * a)"));
        let shown: Vec<String> = s.iter().map(|p| p.to_string()).collect();
        assert_eq!(shown, ["1", "2.2"]);
    }
}
