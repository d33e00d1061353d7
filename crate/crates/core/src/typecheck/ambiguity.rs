use std::collections::BTreeSet;

use thiserror::Error;

use crate::entailment::solve;
use crate::syntax::{match_type, LabelledConstraints, Scheme, TopAxioms, TySubst, TypeEnv};

/// `ā ∩ ftv(C̄) ⊆ ftv(τ)`.
pub fn is_unambiguous(s: &Scheme) -> bool {
    is_unambiguous_given(s, &BTreeSet::new())
}

/// `ā ∩ ftv(C̄) ⊆ ftv(Γ, τ)`.
pub fn is_context_unambiguous(s: &Scheme, env: &TypeEnv) -> bool {
    is_unambiguous_given(s, &env.ftv())
}

fn is_unambiguous_given(s: &Scheme, extra: &BTreeSet<String>) -> bool {
    let body = s.body().ftv();
    let mut ctx = BTreeSet::new();
    for c in s.context() {
        ctx.extend(c.ftv());
    }
    s.quantified
        .iter()
        .filter(|a| ctx.contains(*a))
        .all(|a| body.contains(a) || (extra.contains(a) && !s.quantified.contains(a)))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot compare {0} without guessing an instantiation")]
pub struct SearchExceeded(pub Scheme);

/// `(Q1, σ1) ≤ (Q2, σ2)`: some `θ = [ā ↦ τ̄]` makes the bodies equal and
/// `Q2 ∧ C̄2 ⊩ Q1 ∧ θ(C̄1)`. θ comes from one-way matching of the bodies only.
pub fn more_general(
    axioms: &TopAxioms,
    q1: &LabelledConstraints,
    s1: &Scheme,
    q2: &LabelledConstraints,
    s2: &Scheme,
) -> Result<bool, SearchExceeded> {
    let mut avoid = s2.ftv();
    avoid.extend(s2.quantified.iter().cloned());
    avoid.extend(q1.ftv());
    avoid.extend(q2.ftv());
    let s1 = s1.freshen(&avoid);
    let vars: BTreeSet<String> = s1.quantified.iter().cloned().collect();
    let mut theta = TySubst::new();
    if !match_type(s1.body(), s2.body(), &vars, &mut theta) {
        return Ok(false);
    }
    for c in s1.context() {
        if c.ftv().iter().any(|v| vars.contains(v) && !theta.contains(v)) {
            return Err(SearchExceeded(s1.clone()));
        }
    }
    let mut givens = q2.clone();
    for (i, c) in s2.context().iter().enumerate() {
        givens.push(format!("given{}", i + 1), c.clone());
    }
    let wanted = q1
        .constraints()
        .cloned()
        .chain(s1.context().iter().map(|c| c.apply(&theta)));
    for c in wanted {
        if solve(axioms, &givens, &c).is_err() {
            return Ok(false);
        }
    }
    Ok(true)
}
