//! Abstract syntax of the source language and of the System F target.

mod fresh;
mod source;
mod subst;
mod target;

pub use fresh::{fresh_variant, is_meta, pretty_tyvar_names, NameSupply, META_PREFIX};
pub use source::{
    AxiomError, AxiomScheme, Constraint, EnvEntry, LabelledConstraints, QualType, Scheme,
    SrcExpr, SrcType, TopAxioms, TypeEnv,
};
pub use subst::{match_type, unify_types, unify_with, TySubst, UnifyFailure};
pub use target::{EvSubst, SpineArg, TargetEnv, TargetEnvEntry, TargetTerm, TargetType};
