//! Evidence-producing entailment `𝒬 ∧ Q ⊩ tev : C`.
//!
//! Resolution tries local givens first (leftmost), then the unique axiom whose
//! head matches the wanted constraint. Matching is one-way; type variables in
//! the wanted constraint are rigid.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::elaborate::elab_mono;
use crate::syntax::{
    match_type, AxiomScheme, Constraint, EvSubst, LabelledConstraints, NameSupply, TargetTerm,
    TopAxioms, TySubst,
};

pub const DEFAULT_SOLVE_DEPTH: usize = 32;
pub const DEFAULT_CLOSURE_DEPTH: usize = 5;
pub const DEFAULT_CLOSURE_CAP: usize = 10_000;

/// Bounds for resolution and closure computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub solve_depth: usize,
    pub closure_depth: usize,
    pub closure_cap: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            solve_depth: DEFAULT_SOLVE_DEPTH,
            closure_depth: DEFAULT_CLOSURE_DEPTH,
            closure_cap: DEFAULT_CLOSURE_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Given { evidence: String, constraint: Constraint },
    Axiom { name: String, constraint: Constraint },
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Given {
                evidence,
                constraint,
            } => write!(f, "{constraint} by given {evidence}"),
            Step::Axiom { name, constraint } => write!(f, "{constraint} by instance {name}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub evidence: TargetTerm,
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("no instance for {0}")]
    Unsolvable(Constraint),
    #[error("instance resolution for {constraint} exceeded depth {limit}")]
    DepthExceeded { constraint: Constraint, limit: usize },
}

struct Solver<'a> {
    axioms: &'a TopAxioms,
    givens: &'a [(Constraint, TargetTerm)],
    limit: usize,
    steps: Vec<Step>,
}

impl Solver<'_> {
    fn go(&mut self, c: &Constraint, depth: usize) -> Result<TargetTerm, SolveError> {
        if depth > self.limit {
            return Err(SolveError::DepthExceeded {
                constraint: c.clone(),
                limit: self.limit,
            });
        }
        if let Some((_, ev)) = self.givens.iter().find(|(g, _)| g == c) {
            self.steps.push(Step::Given {
                evidence: ev.to_string(),
                constraint: c.clone(),
            });
            return Ok(ev.clone());
        }
        let Some((ax, theta)) = matching_axiom(self.axioms, c) else {
            return Err(SolveError::Unsolvable(c.clone()));
        };
        self.steps.push(Step::Axiom {
            name: ax.name.clone(),
            constraint: c.clone(),
        });
        let mut args = Vec::with_capacity(ax.premises.len());
        for p in &ax.premises {
            args.push(self.go(&p.apply(&theta), depth + 1)?);
        }
        Ok(axiom_evidence(ax, &theta, args))
    }
}

/// The unique axiom whose head matches `c`, with the matching substitution.
pub fn matching_axiom<'a>(axioms: &'a TopAxioms, c: &Constraint) -> Option<(&'a AxiomScheme, TySubst)> {
    axioms
        .iter()
        .find_map(|ax| ax.match_head(c).map(|theta| (ax, theta)))
}

/// `name ῡ t̄ev` with `ῡ = θ(ā)` in quantifier order.
pub fn axiom_evidence(ax: &AxiomScheme, theta: &TySubst, premises: Vec<TargetTerm>) -> TargetTerm {
    let tys = ax.quantified.iter().map(|q| {
        elab_mono(
            theta
                .get(q)
                .expect("axiom quantifiers are determined by the head"),
        )
    });
    TargetTerm::apps(
        TargetTerm::ty_apps(TargetTerm::var(ax.name.clone()), tys),
        premises,
    )
}

fn labelled(givens: &LabelledConstraints) -> Vec<(Constraint, TargetTerm)> {
    givens
        .iter()
        .map(|(d, c)| (c.clone(), TargetTerm::var(d.clone())))
        .collect()
}

/// Solve against givens whose evidence is an arbitrary term.
pub fn solve_from(
    axioms: &TopAxioms,
    givens: &[(Constraint, TargetTerm)],
    wanted: &Constraint,
    limit: usize,
) -> Result<SolveResult, SolveError> {
    let mut s = Solver {
        axioms,
        givens,
        limit,
        steps: Vec::new(),
    };
    let evidence = s.go(wanted, 0)?;
    Ok(SolveResult {
        evidence,
        steps: s.steps,
    })
}

pub fn solve_with_depth(
    axioms: &TopAxioms,
    givens: &LabelledConstraints,
    wanted: &Constraint,
    limit: usize,
) -> Result<SolveResult, SolveError> {
    solve_from(axioms, &labelled(givens), wanted, limit).map_err(|e| match e {
        SolveError::Unsolvable(_) => SolveError::Unsolvable(wanted.clone()),
        other => other,
    })
}

pub fn solve(
    axioms: &TopAxioms,
    givens: &LabelledConstraints,
    wanted: &Constraint,
) -> Result<SolveResult, SolveError> {
    solve_with_depth(axioms, givens, wanted, DEFAULT_SOLVE_DEPTH)
}

/// Solve every wanted; fails on the first one that cannot be solved.
pub fn solve_all(
    axioms: &TopAxioms,
    givens: &LabelledConstraints,
    wanteds: &LabelledConstraints,
) -> Result<EvSubst, SolveError> {
    let mut eta = EvSubst::new();
    for (d, c) in wanteds.iter() {
        eta.insert(d.clone(), solve(axioms, givens, c)?.evidence);
    }
    Ok(eta)
}

/// Distinct evidence choices for `wanted`: the canonical (givens-first) one,
/// then each given that matches directly, then the derivation through the
/// axioms alone.
pub fn alternatives(
    axioms: &TopAxioms,
    givens: &LabelledConstraints,
    wanted: &Constraint,
) -> Vec<TargetTerm> {
    let mut out: Vec<TargetTerm> = Vec::new();
    let mut push = |t: TargetTerm| {
        if !out.contains(&t) {
            out.push(t);
        }
    };
    if let Ok(r) = solve(axioms, givens, wanted) {
        push(r.evidence);
    }
    for (d, c) in givens.iter() {
        if c == wanted {
            push(TargetTerm::var(d.clone()));
        }
    }
    if let Some((ax, theta)) = matching_axiom(axioms, wanted) {
        let premises: Option<Vec<TargetTerm>> = ax
            .premises
            .iter()
            .map(|p| solve(axioms, givens, &p.apply(&theta)).ok().map(|r| r.evidence))
            .collect();
        if let Some(args) = premises {
            push(axiom_evidence(ax, &theta, args));
        }
    }
    out
}

/// Rewrite wanteds through the axioms until only constraints on bare type
/// variables, or constraints no axiom matches, remain. Identical residual
/// constraints share one label.
pub fn simplify(
    axioms: &TopAxioms,
    wanteds: &LabelledConstraints,
    supply: &mut NameSupply,
) -> Result<(LabelledConstraints, EvSubst), SolveError> {
    simplify_with_depth(axioms, wanteds, supply, DEFAULT_SOLVE_DEPTH)
}

pub fn simplify_with_depth(
    axioms: &TopAxioms,
    wanteds: &LabelledConstraints,
    supply: &mut NameSupply,
    limit: usize,
) -> Result<(LabelledConstraints, EvSubst), SolveError> {
    struct Simp<'a> {
        axioms: &'a TopAxioms,
        residual: LabelledConstraints,
        supply: &'a mut NameSupply,
        limit: usize,
    }
    impl Simp<'_> {
        fn go(&mut self, c: &Constraint, label: Option<&str>, depth: usize) -> Result<TargetTerm, SolveError> {
            if depth > self.limit {
                return Err(SolveError::DepthExceeded {
                    constraint: c.clone(),
                    limit: self.limit,
                });
            }
            if let Some((d, _)) = self.residual.iter().find(|(_, r)| r == c) {
                return Ok(TargetTerm::var(d.clone()));
            }
            let rewrite = if c.is_var_headed() {
                None
            } else {
                matching_axiom(self.axioms, c)
            };
            match rewrite {
                Some((ax, theta)) => {
                    let mut args = Vec::new();
                    for p in &ax.premises {
                        args.push(self.go(&p.apply(&theta), None, depth + 1)?);
                    }
                    Ok(axiom_evidence(ax, &theta, args))
                }
                None => {
                    let d = match label {
                        Some(l) => l.to_string(),
                        None => self.supply.fresh("d"),
                    };
                    self.residual.push(d.clone(), c.clone());
                    Ok(TargetTerm::var(d))
                }
            }
        }
    }
    for l in wanteds.labels() {
        supply.reserve(l.clone());
    }
    let mut s = Simp {
        axioms,
        residual: LabelledConstraints::new(),
        supply,
        limit,
    };
    let mut eta = EvSubst::new();
    for (d, c) in wanteds.iter() {
        let ev = s.go(c, Some(d), 0)?;
        eta.insert(d.clone(), ev);
    }
    Ok((s.residual, eta))
}

/// Constraints derivable by forward chaining from a seed set, with evidence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Closure {
    pub entries: Vec<(Constraint, TargetTerm)>,
    pub depth_reached: usize,
    pub truncated: bool,
}

impl Closure {
    pub fn get(&self, c: &Constraint) -> Option<&TargetTerm> {
        self.entries.iter().find(|(e, _)| e == c).map(|(_, t)| t)
    }

    pub fn contains(&self, c: &Constraint) -> bool {
        self.get(c).is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClosureError {
    #[error("derivable-constraint closure exceeded {cap} entries")]
    ClosureExploded { cap: usize },
}

/// Forward-chain axioms from `seeds`. An axiom fires when at least one premise
/// matches an entry of the current set and every remaining premise, once
/// instantiated, is itself solvable from the set. An axiom that would leave a
/// type variable undetermined marks the closure truncated.
pub fn derivable_closure(
    axioms: &TopAxioms,
    seeds: &LabelledConstraints,
    depth: usize,
    cap: usize,
) -> Result<Closure, ClosureError> {
    let mut entries: Vec<(Constraint, TargetTerm)> = labelled(seeds);
    entries.dedup_by(|a, b| a.0 == b.0);
    let mut truncated = false;
    let mut depth_reached = 0;
    for round in 1..=depth.max(1) {
        depth_reached = round;
        let snapshot = entries.clone();
        let mut added = false;
        for ax in axioms.iter() {
            for (i, p) in ax.premises.iter().enumerate() {
                for (c, _) in &snapshot {
                    let vars: BTreeSet<String> = ax.quantified.iter().cloned().collect();
                    let mut theta = TySubst::new();
                    if p.class != c.class || !match_type(&p.arg, &c.arg, &vars, &mut theta) {
                        continue;
                    }
                    let Some(theta) = complete(ax, i, theta, &snapshot, &vars) else {
                        truncated = true;
                        continue;
                    };
                    let head = ax.head.apply(&theta);
                    if entries.iter().any(|(e, _)| *e == head) {
                        continue;
                    }
                    let args: Option<Vec<TargetTerm>> = ax
                        .premises
                        .iter()
                        .map(|q| {
                            solve_from(axioms, &snapshot, &q.apply(&theta), DEFAULT_SOLVE_DEPTH)
                                .ok()
                                .map(|r| r.evidence)
                        })
                        .collect();
                    if let Some(args) = args {
                        entries.push((head, axiom_evidence(ax, &theta, args)));
                        added = true;
                        if entries.len() > cap {
                            return Err(ClosureError::ClosureExploded { cap });
                        }
                    }
                }
            }
        }
        if !added {
            return Ok(Closure {
                entries,
                depth_reached: round,
                truncated,
            });
        }
        if round == depth.max(1) {
            truncated = true;
        }
    }
    Ok(Closure {
        entries,
        depth_reached,
        truncated,
    })
}

/// Bind the quantifiers left open after matching premise `fixed`, by matching
/// the other premises against the set. `None` when some stay undetermined.
fn complete(
    ax: &AxiomScheme,
    fixed: usize,
    theta: TySubst,
    set: &[(Constraint, TargetTerm)],
    vars: &BTreeSet<String>,
) -> Option<TySubst> {
    let mut theta = theta;
    for (j, p) in ax.premises.iter().enumerate() {
        if j == fixed || p.ftv().iter().all(|v| theta.contains(v)) {
            continue;
        }
        let found = set.iter().find_map(|(c, _)| {
            let mut t = theta.clone();
            (p.class == c.class && match_type(&p.arg, &c.arg, vars, &mut t)).then_some(t)
        })?;
        theta = found;
    }
    ax.quantified
        .iter()
        .all(|q| theta.contains(q))
        .then_some(theta)
}

#[cfg(test)]
mod tests;
