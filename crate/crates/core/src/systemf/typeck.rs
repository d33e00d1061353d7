use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::surface::{SysfFile, SysfItem};
use crate::syntax::{fresh_variant, TargetEnv, TargetTerm, TargetType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TcError {
    #[error("unbound variable `{0}`")]
    UnboundVar(String),
    #[error("type variable `{0}` is not in scope")]
    UnboundTypeVar(String),
    #[error("type mismatch in `{term}`: expected {expected}, found {found}")]
    Mismatch {
        expected: TargetType,
        found: TargetType,
        term: TargetTerm,
    },
    #[error("`{term}` has type {ty}, which is not a function type")]
    NotAFunction { ty: TargetType, term: TargetTerm },
    #[error("`{term}` has type {ty}, which is not a polymorphic type")]
    NotAForall { ty: TargetType, term: TargetTerm },
}

fn well_formed(env: &TargetEnv, ty: &TargetType) -> Result<(), TcError> {
    match ty.ftv().into_iter().find(|a| !env.has_tyvar(a)) {
        Some(a) => Err(TcError::UnboundTypeVar(a)),
        None => Ok(()),
    }
}

/// The type of `t` under `env`, by the syntax-directed rules.
pub fn tc_target(env: &TargetEnv, t: &TargetTerm) -> Result<TargetType, TcError> {
    let mut env = env.clone();
    tc(&mut env, t)
}

fn tc(env: &mut TargetEnv, t: &TargetTerm) -> Result<TargetType, TcError> {
    match t {
        TargetTerm::Var(x) => env
            .lookup(x)
            .cloned()
            .ok_or_else(|| TcError::UnboundVar(x.clone())),
        TargetTerm::Lam(x, ty, body) => {
            well_formed(env, ty)?;
            env.push_term(x.clone(), ty.clone());
            let r = tc(env, body);
            env.pop();
            Ok(TargetType::arrow(ty.clone(), r?))
        }
        TargetTerm::App(f, a) => {
            let ft = tc(env, f)?;
            let TargetType::Arrow(dom, cod) = ft else {
                return Err(TcError::NotAFunction {
                    ty: ft,
                    term: (**f).clone(),
                });
            };
            let at = tc(env, a)?;
            if !at.alpha_eq(&dom) {
                return Err(TcError::Mismatch {
                    expected: *dom,
                    found: at,
                    term: (**a).clone(),
                });
            }
            Ok(*cod)
        }
        TargetTerm::TyLam(a, body) => {
            if env.has_tyvar(a) {
                // Rename a shadowing binder so outer occurrences stay distinct.
                let mut avoid = BTreeSet::new();
                body.all_type_names(&mut avoid);
                for e in env.entries() {
                    if let crate::syntax::TargetEnvEntry::TyVar(b) = e {
                        avoid.insert(b.clone());
                    }
                }
                let fresh = fresh_variant(a, &avoid);
                let renamed = body.subst_types(&BTreeMap::from([(
                    a.clone(),
                    TargetType::var(fresh.clone()),
                )]));
                return tc(env, &TargetTerm::ty_lam(fresh, renamed));
            }
            env.push_tyvar(a.clone());
            let r = tc(env, body);
            env.pop();
            Ok(TargetType::forall(a.clone(), r?))
        }
        TargetTerm::TyApp(f, ty) => {
            well_formed(env, ty)?;
            let ft = tc(env, f)?;
            let TargetType::Forall(a, body) = ft else {
                return Err(TcError::NotAForall {
                    ty: ft,
                    term: (**f).clone(),
                });
            };
            Ok(body.subst1(&a, ty))
        }
    }
}

/// Check each `def` against its declared type in the environment of the
/// items before it; returns the environment of all items.
pub fn check_sysf_file(file: &SysfFile) -> Result<TargetEnv, (String, TcError)> {
    let mut env = TargetEnv::new();
    for item in &file.items {
        match item {
            SysfItem::Val(name, ty) => {
                well_formed(&env, ty).map_err(|e| (name.clone(), e))?;
            }
            SysfItem::Def(name, ty, body) => {
                well_formed(&env, ty).map_err(|e| (name.clone(), e))?;
                let found = tc_target(&env, body).map_err(|e| (name.clone(), e))?;
                if !found.alpha_eq(ty) {
                    return Err((
                        name.clone(),
                        TcError::Mismatch {
                            expected: ty.clone(),
                            found,
                            term: body.clone(),
                        },
                    ));
                }
            }
        }
        env.push_term(item.name().to_string(), item.ty().clone());
    }
    if let Some(main) = &file.main {
        tc_target(&env, main).map_err(|e| ("<main>".to_string(), e))?;
    }
    Ok(env)
}

/// Replace references to the file's `def`s by their bodies, innermost last.
pub fn inline_defs(file: &SysfFile, t: &TargetTerm) -> TargetTerm {
    let mut out = t.clone();
    for item in file.items.iter().rev() {
        if let SysfItem::Def(name, _, body) = item {
            if out.free_vars().contains(name) {
                out = out.subst_terms(&BTreeMap::from([(name.clone(), body.clone())]));
            }
        }
    }
    out
}
