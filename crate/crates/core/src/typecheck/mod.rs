//! Type inference and elaboration of source expressions into System F.

mod ambiguity;
mod infer;
mod program;
mod safety;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

pub use ambiguity::{is_context_unambiguous, is_unambiguous, more_general, SearchExceeded};
pub use infer::unconstrained_type;
pub use program::{
    check_program, check_program_with, program_target_env, program_type_env, to_sysf, CheckedItem,
    CheckedProgram, ItemError,
};
pub use safety::{context_label, dictapp_safety, SafetyReport, Verdict, Witness};

use crate::entailment::{Bounds, Step};
use crate::syntax::{
    Constraint, LabelledConstraints, Scheme, SrcExpr, SrcType, TargetTerm, TopAxioms, TypeEnv,
};
use infer::{expr_names, Infer};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckOptions {
    pub bounds: Bounds,
    /// Run the safety check at every dictionary application.
    pub guard: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            bounds: Bounds::default(),
            guard: true,
        }
    }
}

/// Deviations from the canonical elaboration, used to build alternative
/// derivations of the same item.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Strategy {
    /// Final constraints of the canonical run, by label. When present, every
    /// wanted solvable where it arises is discharged there.
    pub eager: Option<BTreeMap<String, Constraint>>,
    /// Alternative index (into [`ChoiceSite::alternatives`]) per label.
    pub choices: BTreeMap<String, usize>,
    /// Shuffle generalised quantifiers and context with this seed.
    pub permute: Option<u64>,
}

/// A wanted with more than one evidence choice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceSite {
    pub label: String,
    pub constraint: Constraint,
    pub alternatives: Vec<TargetTerm>,
}

/// The result of elaborating one top-level item.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elaborated {
    pub scheme: Scheme,
    pub term: TargetTerm,
    pub sites: Vec<ChoiceSite>,
    /// Every wanted introduced during inference, under the final substitution.
    pub wanteds: BTreeMap<String, Constraint>,
    pub safety: Vec<SafetyReport>,
    /// Resolution steps for each discharged wanted.
    pub steps: Vec<(Constraint, Vec<Step>)>,
}

/// `Γ ⊢ e : τ ⇝ t` with the wanteds still open.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub residual: LabelledConstraints,
    pub ty: SrcType,
    pub term: TargetTerm,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unbound variable `{0}`")]
    UnboundVar(String),
    #[error("type mismatch: expected {expected}, found {found}")]
    Mismatch { expected: SrcType, found: SrcType },
    #[error("cannot construct the infinite type {var} = {ty}")]
    Occurs { var: SrcType, ty: SrcType },
    #[error("could not deduce {0}")]
    Unsolvable(Constraint),
    #[error("ambiguous constraint {0}: its type is not determined")]
    AmbiguousConstraint(Constraint),
    #[error("instance resolution for {constraint} exceeded depth {limit}")]
    DepthExceeded { constraint: Constraint, limit: usize },
    #[error("a dictionary can only be supplied to a variable or an annotated expression")]
    UnspecifiedDictApp,
    #[error("dictionary applications cannot be chained; annotate the intermediate result")]
    ChainedDictApp,
    #[error("{at} does not occur in the context of {scheme}")]
    NoSuchConstraint { at: Constraint, scheme: Scheme },
    #[error("`{var}` is not quantified in {scheme}")]
    NotQuantified { var: String, scheme: Scheme },
    #[error("a dictionary must be supplied for a constraint on a type variable or a closed type, not {0}")]
    BadDictAppConstraint(Constraint),
    #[error("the type {0} is ambiguous")]
    AmbiguousType(Scheme),
    #[error("{0}")]
    Unsafe(Box<SafetyReport>),
    #[error("{0}")]
    SafetyInconclusive(Box<SafetyReport>),
    #[error("type variable `{0}` escapes its scope")]
    SkolemEscape(String),
}

impl TypeError {
    /// The error comes from a search bound, not from the program.
    pub fn is_bound_exceeded(&self) -> bool {
        matches!(
            self,
            TypeError::DepthExceeded { .. } | TypeError::SafetyInconclusive(_)
        )
    }
}

fn reserved_names(env: &TypeEnv, e: &SrcExpr, sig: Option<&Scheme>) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for entry in env.entries() {
        match entry {
            crate::syntax::EnvEntry::Term(x, _) => out.insert(x.clone()),
            crate::syntax::EnvEntry::TyVar(a) => out.insert(a.clone()),
        };
    }
    expr_names(e, &mut out);
    if let Some(s) = sig {
        out.extend(s.quantified.iter().cloned());
    }
    out
}

/// Elaborate one item, against its signature when it has one.
pub fn elaborate_item(
    axioms: &TopAxioms,
    env: &TypeEnv,
    e: &SrcExpr,
    sig: Option<&Scheme>,
    opts: &CheckOptions,
    strategy: &Strategy,
) -> Result<Elaborated, TypeError> {
    let mut reserved = reserved_names(env, e, sig);
    reserved.extend(axioms.names().cloned());
    let inf = Infer::new(axioms, opts, strategy, reserved);
    match sig {
        Some(s) => inf.run_sig(env, e, s),
        None => inf.run_top(env, e),
    }
}

/// Infer a monotype for `e`, leaving the wanteds unsolved.
pub fn infer(axioms: &TopAxioms, env: &TypeEnv, e: &SrcExpr) -> Result<Derivation, TypeError> {
    let mut reserved = reserved_names(env, e, None);
    reserved.extend(axioms.names().cloned());
    let opts = CheckOptions::default();
    let strategy = Strategy::default();
    Infer::new(axioms, &opts, &strategy, reserved).run_infer(env, e)
}

/// The principal scheme of `e` and its elaboration.
pub fn check_top(axioms: &TopAxioms, env: &TypeEnv, e: &SrcExpr) -> Result<(Scheme, TargetTerm), TypeError> {
    let r = elaborate_item(axioms, env, e, None, &CheckOptions::default(), &Strategy::default())?;
    Ok((r.scheme, r.term))
}

/// Elaborate `e` against the signature `sig`.
pub fn check_sig(
    axioms: &TopAxioms,
    env: &TypeEnv,
    e: &SrcExpr,
    sig: &Scheme,
) -> Result<TargetTerm, TypeError> {
    elaborate_item(axioms, env, e, Some(sig), &CheckOptions::default(), &Strategy::default())
        .map(|r| r.term)
}
