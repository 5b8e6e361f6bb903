use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::kernel::{KernelError, ProofState, TacticApp, Theory};
use crate::lattice::{goal_has_type, match_link_feature, ClassRef, Goal, GoalType, LinkKey};
use crate::term::Term;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("conclusion `{0}` does not match the conclusion class")]
    Conclusion(Term),
    #[error("no fact matches class `{0}`")]
    Facts(String),
    #[error("link `{0}` has no witness")]
    Link(LinkKey),
    #[error("goal does not have the tactic's input type")]
    Precondition,
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// One list of goals per output label.
pub type Partition = Vec<Vec<Goal>>;

pub fn unlift(g: &Goal) -> ProofState {
    g.ps.clone()
}

fn classify(ps: &ProofState, candidates: &BTreeSet<Term>, ty: &GoalType) -> Result<BTreeMap<String, BTreeSet<Term>>, LiftError> {
    if !ty.concl.matches(&ps.concl) {
        return Err(LiftError::Conclusion(ps.concl.clone()));
    }
    let mut fmap: BTreeMap<String, BTreeSet<Term>> = BTreeMap::new();
    for c in ty.facts() {
        let found: BTreeSet<Term> = candidates.iter().filter(|e| c.matches(e)).cloned().collect();
        if found.is_empty() {
            return Err(LiftError::Facts(c.label.clone()));
        }
        fmap.insert(c.label.clone(), found);
    }
    for (k, d) in ty.link.entries() {
        let concl = BTreeSet::from([ps.concl.clone()]);
        let side = |r: &ClassRef, fmap: &BTreeMap<String, BTreeSet<Term>>| match r {
            ClassRef::Concl => concl.clone(),
            ClassRef::Fact(l) => fmap.get(l).cloned().unwrap_or_default(),
        };
        let (left, right) = (side(&k.left, &fmap), side(&k.right, &fmap));
        let l = |a: &Term, b: &Term| match_link_feature(k.feature, d, a, b);
        let kept_left: BTreeSet<Term> = left.iter().filter(|a| right.iter().any(|b| l(a, b))).cloned().collect();
        let kept_right: BTreeSet<Term> = right.iter().filter(|b| left.iter().any(|a| l(a, b))).cloned().collect();
        if kept_left.is_empty() || kept_right.is_empty() {
            return Err(LiftError::Link(k.clone()));
        }
        for (r, kept) in [(&k.left, kept_left), (&k.right, kept_right)] {
            match r {
                ClassRef::Fact(lbl) => {
                    fmap.insert(lbl.clone(), kept);
                }
                ClassRef::Concl => {}
            }
        }
    }
    Ok(fmap)
}

/// Lifts a proof state produced from `parent` into goal type `ty`.
pub fn lift_one(ps: ProofState, parent: &Goal, ty: &GoalType, new_facts: &BTreeSet<Term>) -> Result<Goal, LiftError> {
    let mut candidates = parent.fact_range();
    candidates.extend(new_facts.iter().cloned());
    let fmap = classify(&ps, &candidates, ty)?;
    let g = Goal {
        fmap,
        ps,
        parent: Some(Arc::new(parent.clone())),
    };
    if !goal_has_type(&g, ty) {
        let key = ty.link.entries().next().map(|(k, _)| k.clone());
        return Err(key.map_or(LiftError::Precondition, LiftError::Link));
    }
    Ok(g)
}

/// Types a fresh proof state against the strategy's input label, drawing
/// facts from its hypotheses.
pub fn initial_goal(ps: ProofState, ty: &GoalType) -> Result<Goal, LiftError> {
    let candidates: BTreeSet<Term> = ps.hyps.values().cloned().collect();
    let fmap = classify(&ps, &candidates, ty)?;
    let g = Goal { fmap, ps, parent: None };
    if !goal_has_type(&g, ty) {
        return Err(LiftError::Precondition);
    }
    Ok(g)
}

pub(crate) fn run_on_goal(theory: &Theory, tac: &TacticApp, g: &Goal) -> Result<Vec<Vec<ProofState>>, KernelError> {
    theory.run_tactic(tac, &g.ps, &|label| g.fmap.get(label).cloned())
}

/// Every way to send each state to one of `options`, lifting it there.
pub(crate) fn route(states: &[ProofState], parent: &Goal, options: &[&GoalType]) -> Vec<Vec<(usize, Goal)>> {
    let none = BTreeSet::new();
    let mut acc: Vec<Vec<(usize, Goal)>> = vec![Vec::new()];
    for s in states {
        let choices: Vec<(usize, Goal)> = options
            .iter()
            .enumerate()
            .filter_map(|(i, ty)| lift_one(s.clone(), parent, ty, &none).ok().map(|g| (i, g)))
            .collect();
        let mut next = Vec::new();
        for prefix in &acc {
            for c in &choices {
                let mut p = prefix.clone();
                p.push(c.clone());
                next.push(p);
            }
        }
        acc = next;
        if acc.is_empty() {
            break;
        }
    }
    acc
}

/// Runs a tactic on a typed goal and lifts every result list into the
/// output labels; the outer vector follows the tactic's alternatives.
pub fn lift_tactic(
    theory: &Theory,
    tac: &TacticApp,
    alpha: &GoalType,
    betas: &[GoalType],
    g: &Goal,
) -> Result<Vec<Vec<Partition>>, LiftError> {
    if !goal_has_type(g, alpha) {
        return Err(LiftError::Precondition);
    }
    let options: Vec<&GoalType> = betas.iter().collect();
    let mut out = Vec::new();
    for alt in run_on_goal(theory, tac, g)? {
        let parts = route(&alt, g, &options)
            .into_iter()
            .map(|assignment| {
                let mut p: Partition = vec![Vec::new(); betas.len()];
                for (i, goal) in assignment {
                    p[i].push(goal);
                }
                p
            })
            .collect();
        out.push(parts);
    }
    Ok(out)
}
