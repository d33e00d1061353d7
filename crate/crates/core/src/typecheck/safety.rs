use std::fmt;

use crate::entailment::{derivable_closure, solve_with_depth, Bounds, SolveError};
use crate::syntax::{fresh_variant, Constraint, LabelledConstraints, TargetTerm, TopAxioms};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Safe,
    Unsafe,
    Inconclusive,
}

/// A constraint derivable from the supplied dictionary that the remaining
/// constraints also entail, with all the evidence involved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub constraint: Constraint,
    pub from_dict: TargetTerm,
    pub from_rest: TargetTerm,
    pub from_axioms: Option<TargetTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SafetyReport {
    pub at: Constraint,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub closure_truncated: bool,
    /// Why the check could not be decided, for `Inconclusive`.
    pub reason: Option<String>,
}

impl fmt::Display for SafetyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.verdict, &self.witness) {
            (Verdict::Safe, _) => write!(f, "dictionary for {} is safe", self.at),
            (Verdict::Unsafe, Some(w)) => {
                write!(
                    f,
                    "unsafe dictionary application for {}: {} follows from the supplied \
                     dictionary ({}) but also from the remaining constraints ({})",
                    self.at, w.constraint, w.from_dict, w.from_rest
                )?;
                if let Some(g) = &w.from_axioms {
                    write!(f, "; the instances alone give {g}")?;
                }
                Ok(())
            }
            (Verdict::Unsafe, None) => write!(f, "unsafe dictionary application for {}", self.at),
            (Verdict::Inconclusive, _) => write!(
                f,
                "cannot decide whether the dictionary for {} is safe: {}",
                self.at,
                self.reason.as_deref().unwrap_or("search bound reached")
            ),
        }
    }
}

/// Label used for the `k`-th (1-based) constraint of the function's context.
pub fn context_label(k: usize) -> String {
    format!("ctx{k}")
}

/// `∀C. 𝒬 ∧ TC a ⊩ tev:C ⇒ (𝒬 ∧ Q ∧ C̄1 ∧ C̄2 ⊮ C ∨ 𝒬 ⊩ tev:C)`, decided over a
/// bounded forward closure. `c1` and `c2` are the context entries before and
/// after `at`; they are labelled by their position in the whole context.
pub fn dictapp_safety(
    axioms: &TopAxioms,
    q: &LabelledConstraints,
    c1: &[Constraint],
    c2: &[Constraint],
    at: &Constraint,
    bounds: &Bounds,
) -> SafetyReport {
    let mut taken: std::collections::BTreeSet<String> = q.labels().cloned().collect();
    taken.extend(axioms.names().cloned());
    let dict_label = fresh_variant("dict", &taken);
    let seed = LabelledConstraints::from_entries(vec![(dict_label.clone(), at.clone())]);
    let mut rest = q.clone();
    for (i, c) in c1.iter().enumerate() {
        rest.push(context_label(i + 1), c.clone());
    }
    for (i, c) in c2.iter().enumerate() {
        rest.push(context_label(c1.len() + i + 2), c.clone());
    }
    let report = |verdict, witness, truncated, reason: Option<String>| SafetyReport {
        at: at.clone(),
        verdict,
        witness,
        closure_truncated: truncated,
        reason,
    };
    let closure = match derivable_closure(axioms, &seed, bounds.closure_depth, bounds.closure_cap) {
        Ok(c) => c,
        Err(e) => return report(Verdict::Inconclusive, None, true, Some(e.to_string())),
    };
    for (c, tev) in &closure.entries {
        match solve_with_depth(axioms, &rest, c, bounds.solve_depth) {
            Ok(r) => {
                let global = solve_with_depth(axioms, &LabelledConstraints::new(), c, bounds.solve_depth)
                    .ok()
                    .map(|g| g.evidence);
                if global.as_ref().is_some_and(|g| g.alpha_eq(tev)) {
                    continue;
                }
                let witness = Witness {
                    constraint: c.clone(),
                    from_dict: tev.clone(),
                    from_rest: r.evidence,
                    from_axioms: global,
                };
                return report(Verdict::Unsafe, Some(witness), closure.truncated, None);
            }
            Err(SolveError::Unsolvable(_)) => {}
            Err(e @ SolveError::DepthExceeded { .. }) => {
                return report(Verdict::Inconclusive, None, closure.truncated, Some(e.to_string()))
            }
        }
    }
    if closure.truncated {
        // Beyond the explored rounds, a constraint can only be newly entailed
        // by the rest if it is one of them; ask for each whether the
        // dictionary derives it.
        for (_, g) in rest.iter() {
            match solve_with_depth(axioms, &seed, g, bounds.solve_depth) {
                Ok(r) if r.evidence.free_vars().contains(&dict_label) => {
                    let from_rest = solve_with_depth(axioms, &rest, g, bounds.solve_depth)
                        .map(|r| r.evidence)
                        .unwrap_or_else(|_| TargetTerm::var(g.to_string()));
                    let witness = Witness {
                        constraint: g.clone(),
                        from_dict: r.evidence,
                        from_rest,
                        from_axioms: None,
                    };
                    return report(Verdict::Unsafe, Some(witness), true, None);
                }
                Ok(_) | Err(SolveError::Unsolvable(_)) => {}
                Err(e @ SolveError::DepthExceeded { .. }) => {
                    return report(Verdict::Inconclusive, None, true, Some(e.to_string()))
                }
            }
        }
        return report(Verdict::Safe, None, true, None);
    }
    report(Verdict::Safe, None, false, None)
}
