//! Proof states, the `subst` and `rule` tactics, and script replay.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::generalise::fact_roles;
use crate::term::{match_term, Term};

/// A left-to-right rewrite `lhs -> rhs`, optionally guarded by `condition`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub name: String,
    pub condition: Option<Term>,
    pub lhs: Term,
    pub rhs: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("equation `{name}`: variable `{var}` does not occur in the left-hand side")]
    UnboundVariable { name: String, var: String },
    #[error("unknown equation `{0}`")]
    UnknownEquation(String),
    #[error("subst takes equation names, not a class reference")]
    SubstWithClass,
    #[error("class reference `{0}` cannot be resolved here")]
    UnresolvedClass(String),
}

impl Equation {
    pub fn new(name: &str, condition: Option<Term>, lhs: Term, rhs: Term) -> Result<Self, KernelError> {
        let bound = lhs.vars();
        let mut used = rhs.vars();
        if let Some(c) = &condition {
            used.extend(c.vars());
        }
        if let Some(var) = used.difference(&bound).next() {
            return Err(KernelError::UnboundVariable {
                name: name.to_string(),
                var: var.clone(),
            });
        }
        Ok(Equation {
            name: name.to_string(),
            condition,
            lhs,
            rhs,
        })
    }

    pub fn is_conditional(&self) -> bool {
        self.condition.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProofState {
    pub hyps: BTreeMap<String, Term>,
    pub concl: Term,
}

impl ProofState {
    pub fn new(hyps: BTreeMap<String, Term>, concl: Term) -> Self {
        ProofState { hyps, concl }
    }

    fn with_concl(&self, concl: Term) -> Self {
        ProofState {
            hyps: self.hyps.clone(),
            concl,
        }
    }
}

impl fmt::Display for ProofState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|- {}", self.concl)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TacticKind {
    Subst,
    Rule,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TacticArg {
    Names(BTreeSet<String>),
    /// A goal-class label; `A|B` stands for the join of classes `A` and `B`.
    Class(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TacticApp {
    pub kind: TacticKind,
    pub arg: TacticArg,
}

impl TacticApp {
    pub fn subst<I: IntoIterator<Item = S>, S: Into<String>>(names: I) -> Self {
        TacticApp {
            kind: TacticKind::Subst,
            arg: TacticArg::Names(names.into_iter().map(Into::into).collect()),
        }
    }

    pub fn rule<I: IntoIterator<Item = S>, S: Into<String>>(names: I) -> Self {
        TacticApp {
            kind: TacticKind::Rule,
            arg: TacticArg::Names(names.into_iter().map(Into::into).collect()),
        }
    }

    pub fn rule_class(label: &str) -> Self {
        TacticApp {
            kind: TacticKind::Rule,
            arg: TacticArg::Class(label.to_string()),
        }
    }
}

impl fmt::Display for TacticApp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kw = match self.kind {
            TacticKind::Subst => "subst",
            TacticKind::Rule => "rule",
        };
        match &self.arg {
            TacticArg::Class(label) => write!(f, "{kw} class {label}"),
            TacticArg::Names(names) if self.kind == TacticKind::Rule && names.len() == 1 => {
                write!(f, "{kw} {}", names.iter().next().unwrap())
            }
            TacticArg::Names(names) => {
                let v: Vec<&str> = names.iter().map(String::as_str).collect();
                write!(f, "{kw} {{{}}}", v.join(", "))
            }
        }
    }
}

/// Every single rewrite of the conclusion by one of `eqs`.
///
/// Alternatives are ordered leftmost-innermost by position, then by equation
/// order; duplicates are dropped. A conditional rewrite yields
/// `[condition, rewritten]`.
pub fn apply_subst(eqs: &[&Equation], ps: &ProofState) -> Vec<Vec<ProofState>> {
    let mut out: Vec<Vec<ProofState>> = Vec::new();
    for pos in ps.concl.positions_postorder() {
        let sub = ps.concl.subterm_at(&pos).expect("position from the term itself");
        for eq in eqs {
            let Some(sigma) = match_term(&eq.lhs, sub) else { continue };
            let rewritten = ps
                .concl
                .replace_at(&pos, eq.rhs.apply(&sigma))
                .expect("position from the term itself");
            let mut alt = Vec::new();
            if let Some(c) = &eq.condition {
                alt.push(ps.with_concl(c.apply(&sigma)));
            }
            alt.push(ps.with_concl(rewritten));
            if !out.contains(&alt) {
                out.push(alt);
            }
        }
    }
    out
}

/// Discharges the goal when its conclusion is syntactically one of `facts`.
pub fn apply_rule(facts: &BTreeSet<Term>, ps: &ProofState) -> Vec<Vec<ProofState>> {
    if facts.contains(&ps.concl) {
        vec![Vec::new()]
    } else {
        Vec::new()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conjecture {
    pub name: String,
    pub hyps: Vec<(String, Term)>,
    pub concl: Term,
}

impl Conjecture {
    pub fn initial_state(&self) -> ProofState {
        ProofState::new(self.hyps.iter().cloned().collect(), self.concl.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Script {
    pub name: String,
    pub conjecture: String,
    pub tactics: Vec<TacticApp>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Theory {
    pub alphabet: BTreeSet<String>,
    pub axioms: BTreeMap<String, Equation>,
    pub conjectures: BTreeMap<String, Conjecture>,
    pub scripts: BTreeMap<String, Script>,
}

impl Theory {
    pub fn equations(&self, names: &BTreeSet<String>) -> Result<Vec<&Equation>, KernelError> {
        names
            .iter()
            .map(|n| self.axioms.get(n).ok_or_else(|| KernelError::UnknownEquation(n.clone())))
            .collect()
    }

    /// Number of output lists a tactic produces per alternative.
    pub fn arity(&self, tac: &TacticApp) -> Result<usize, KernelError> {
        match (&tac.kind, &tac.arg) {
            (TacticKind::Rule, _) => Ok(1),
            (TacticKind::Subst, TacticArg::Names(names)) => {
                let eqs = self.equations(names)?;
                Ok(if eqs.iter().any(|e| e.is_conditional()) { 2 } else { 1 })
            }
            (TacticKind::Subst, TacticArg::Class(_)) => Err(KernelError::SubstWithClass),
        }
    }

    /// Runs a tactic. Rule names that are not hypotheses of `ps` contribute
    /// nothing; class references go through `classes`.
    pub fn run_tactic(
        &self,
        tac: &TacticApp,
        ps: &ProofState,
        classes: &dyn Fn(&str) -> Option<BTreeSet<Term>>,
    ) -> Result<Vec<Vec<ProofState>>, KernelError> {
        match (&tac.kind, &tac.arg) {
            (TacticKind::Subst, TacticArg::Names(names)) => Ok(apply_subst(&self.equations(names)?, ps)),
            (TacticKind::Subst, TacticArg::Class(_)) => Err(KernelError::SubstWithClass),
            (TacticKind::Rule, TacticArg::Names(names)) => {
                let facts: BTreeSet<Term> = names.iter().filter_map(|n| ps.hyps.get(n).cloned()).collect();
                Ok(apply_rule(&facts, ps))
            }
            (TacticKind::Rule, TacticArg::Class(label)) => {
                let mut facts = BTreeSet::new();
                for part in label.split('|') {
                    facts.extend(classes(part).ok_or_else(|| KernelError::UnresolvedClass(part.to_string()))?);
                }
                Ok(apply_rule(&facts, ps))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceNode {
    pub state: ProofState,
    pub tactic: TacticApp,
    pub children: Vec<TraceNode>,
}

impl TraceNode {
    pub fn len(&self) -> usize {
        1 + self.children.iter().map(TraceNode::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Nodes in the order their tactics were applied.
    pub fn preorder(&self) -> Vec<&TraceNode> {
        let mut out = vec![self];
        for c in &self.children {
            out.extend(c.preorder());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofTrace {
    pub conjecture: String,
    pub root: TraceNode,
}

impl ProofTrace {
    /// Open goals after each applied step, starting with the initial goal.
    pub fn frontiers(&self) -> Vec<Vec<ProofState>> {
        let mut stack: Vec<&TraceNode> = vec![&self.root];
        let mut out = vec![vec![self.root.state.clone()]];
        while let Some(n) = stack.first().copied() {
            stack.remove(0);
            let mut next: Vec<&TraceNode> = n.children.iter().collect();
            next.extend(stack);
            stack = next;
            out.push(stack.iter().map(|n| n.state.clone()).collect());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("unknown conjecture `{0}`")]
    UnknownConjecture(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("replay failed at step {step} ({tactic}): {reason}")]
    Failed { step: usize, tactic: String, reason: String },
}

/// Resolves a role label to the hypotheses carrying it in `ps`.
pub fn resolve_role(ps: &ProofState, label: &str) -> Option<BTreeSet<Term>> {
    let roles = fact_roles(&ps.hyps).ok()?;
    let found: BTreeSet<Term> = roles
        .iter()
        .filter(|(_, l)| l.as_str() == label)
        .map(|(n, _)| ps.hyps[n].clone())
        .collect();
    Some(found)
}

/// Replays `script` against the leftmost open goal, backtracking over
/// alternatives. Succeeds when the script closes every goal exactly.
pub fn replay_script(theory: &Theory, conjecture: &str, script: &[TacticApp]) -> Result<ProofTrace, ReplayError> {
    let conj = theory
        .conjectures
        .get(conjecture)
        .ok_or_else(|| ReplayError::UnknownConjecture(conjecture.to_string()))?;
    let mut deepest = (0usize, String::from("no tactic applies"));
    let found = search(theory, vec![conj.initial_state()], script, 0, &mut deepest)?;
    match found {
        Some(mut nodes) => Ok(ProofTrace {
            conjecture: conjecture.to_string(),
            root: nodes.remove(0),
        }),
        None => {
            let (step, reason) = deepest;
            let tactic = script
                .get(step.saturating_sub(1))
                .map_or_else(|| "end of script".to_string(), |t| t.to_string());
            Err(ReplayError::Failed { step, tactic, reason })
        }
    }
}

fn search(
    theory: &Theory,
    frontier: Vec<ProofState>,
    script: &[TacticApp],
    done: usize,
    deepest: &mut (usize, String),
) -> Result<Option<Vec<TraceNode>>, ReplayError> {
    let mut note = |step: usize, reason: String| {
        if step >= deepest.0 {
            *deepest = (step, reason);
        }
    };
    let Some((tac, rest_script)) = script.split_first() else {
        if frontier.is_empty() {
            return Ok(Some(Vec::new()));
        }
        note(done, format!("{} goal(s) left open when the script ended", frontier.len()));
        return Ok(None);
    };
    let Some((head, rest)) = frontier.split_first() else {
        note(done + 1, "no open goal left for this step".to_string());
        return Ok(None);
    };
    let alts = theory.run_tactic(tac, head, &|label| resolve_role(head, label))?;
    if alts.is_empty() {
        note(done + 1, format!("tactic does not apply to {}", head.concl));
        return Ok(None);
    }
    for alt in alts {
        let k = alt.len();
        let mut next = alt;
        next.extend(rest.iter().cloned());
        if let Some(mut nodes) = search(theory, next, rest_script, done + 1, deepest)? {
            let tail = nodes.split_off(k);
            let node = TraceNode {
                state: head.clone(),
                tactic: tac.clone(),
                children: nodes,
            };
            let mut out = vec![node];
            out.extend(tail);
            return Ok(Some(out));
        }
    }
    Ok(None)
}
