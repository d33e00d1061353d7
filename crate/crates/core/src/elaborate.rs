//! Type-level elaboration: source types, constraints, axioms and environments
//! into System F types and environments.

use crate::syntax::{
    AxiomScheme, Constraint, EnvEntry, LabelledConstraints, QualType, Scheme, SrcType,
    TargetEnv, TargetType, TopAxioms, TypeEnv, TySubst,
};

/// `τ ⇝ υ`.
pub fn elab_mono(t: &SrcType) -> TargetType {
    match t {
        SrcType::Var(v) => TargetType::var(v.clone()),
        SrcType::Arrow(a, b) => TargetType::arrow(elab_mono(a), elab_mono(b)),
        SrcType::Dict(c, a) => TargetType::dict(c.clone(), elab_mono(a)),
        SrcType::Con(c, args) => TargetType::con(c.clone(), args.iter().map(elab_mono).collect()),
    }
}

/// `TC τ ⇝ Dict TC υ`.
pub fn elab_constraint(c: &Constraint) -> TargetType {
    TargetType::dict(c.class.clone(), elab_mono(&c.arg))
}

/// `C̄ ⇒ τ ⇝ ῡ_C → υ`: one dictionary arrow per constraint, in order.
pub fn elab_qual(q: &QualType) -> TargetType {
    TargetType::arrows(q.context.iter().map(elab_constraint), elab_mono(&q.body))
}

pub fn elab_scheme(s: &Scheme) -> TargetType {
    TargetType::foralls(s.quantified.iter().cloned(), elab_qual(&s.qual))
}

/// `∀ā. C̄ ⇒ C ⇝ ∀ā. ῡ → υ`.
pub fn elab_axiom(a: &AxiomScheme) -> TargetType {
    TargetType::foralls(
        a.quantified.iter().cloned(),
        TargetType::arrows(
            a.premises.iter().map(elab_constraint),
            elab_constraint(&a.head),
        ),
    )
}

/// `θ_υ`: the pointwise elaboration of a type substitution.
pub fn elab_subst(theta: &TySubst) -> std::collections::BTreeMap<String, TargetType> {
    theta
        .iter()
        .map(|(k, v)| (k.clone(), elab_mono(v)))
        .collect()
}

/// `𝒬, Q, Γ ⇝ 𝒬_υ ++ Q_υ ++ Γ_υ`.
pub fn elab_env(axioms: &TopAxioms, q: &LabelledConstraints, g: &TypeEnv) -> TargetEnv {
    let mut env = TargetEnv::new();
    for a in axioms.iter() {
        env.push_term(a.name.clone(), elab_axiom(a));
    }
    for (d, c) in q.iter() {
        env.push_term(d.clone(), elab_constraint(c));
    }
    for entry in g.entries() {
        match entry {
            EnvEntry::Term(x, s) => env.push_term(x.clone(), elab_scheme(s)),
            EnvEntry::TyVar(a) => env.push_tyvar(a.clone()),
        }
    }
    env
}
