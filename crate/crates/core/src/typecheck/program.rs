use thiserror::Error;

use super::{elaborate_item, CheckOptions, Elaborated, Strategy, TypeError};
use crate::elaborate::{elab_axiom, elab_scheme};
use crate::surface::{Program, SysfFile, SysfItem};
use crate::syntax::{TargetEnv, TypeEnv};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckedItem {
    pub name: String,
    /// A `check` item rather than a `def`.
    pub is_check: bool,
    pub elab: Elaborated,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckedProgram {
    pub items: Vec<CheckedItem>,
}

impl CheckedProgram {
    pub fn item(&self, name: &str) -> Option<&CheckedItem> {
        self.items.iter().find(|i| i.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("in `{item}`: {error}")]
pub struct ItemError {
    pub item: String,
    pub is_check: bool,
    pub error: TypeError,
}

pub fn check_program(p: &Program, opts: &CheckOptions) -> Result<CheckedProgram, ItemError> {
    check_program_with(p, opts, &|_| Strategy::default())
}

/// Check defs in order, each seeing the prims and the defs before it, then
/// the checks, which see every def. `strategy` picks the strategy per item.
pub fn check_program_with(
    p: &Program,
    opts: &CheckOptions,
    strategy: &dyn Fn(&str) -> Strategy,
) -> Result<CheckedProgram, ItemError> {
    let mut env = p.prim_env();
    let mut items = Vec::new();
    for d in &p.defs {
        let elab = elaborate_item(&p.axioms, &env, &d.body, d.sig.as_ref(), opts, &strategy(&d.name))
            .map_err(|error| ItemError {
                item: d.name.clone(),
                is_check: false,
                error,
            })?;
        env.push_term(d.name.clone(), elab.scheme.clone());
        items.push(CheckedItem {
            name: d.name.clone(),
            is_check: false,
            elab,
        });
    }
    for c in &p.checks {
        let elab = elaborate_item(&p.axioms, &env, &c.body, None, opts, &strategy(&c.name))
            .map_err(|error| ItemError {
                item: c.name.clone(),
                is_check: true,
                error,
            })?;
        items.push(CheckedItem {
            name: c.name.clone(),
            is_check: true,
            elab,
        });
    }
    Ok(CheckedProgram { items })
}

/// The instances and prims as System F constants.
pub fn program_target_env(p: &Program) -> TargetEnv {
    let mut env = TargetEnv::new();
    for ax in p.axioms.iter() {
        env.push_term(ax.name.clone(), elab_axiom(ax));
    }
    for (name, s) in &p.prims {
        env.push_term(name.clone(), elab_scheme(s));
    }
    env
}

/// The elaborated program: instances and prims as `val`s, every checked
/// item as a `def`.
pub fn to_sysf(p: &Program, checked: &CheckedProgram) -> SysfFile {
    let mut items: Vec<SysfItem> = p
        .axioms
        .iter()
        .map(|ax| SysfItem::Val(ax.name.clone(), elab_axiom(ax)))
        .collect();
    items.extend(
        p.prims
            .iter()
            .map(|(n, s)| SysfItem::Val(n.clone(), elab_scheme(s))),
    );
    items.extend(checked.items.iter().map(|i| {
        SysfItem::Def(i.name.clone(), elab_scheme(&i.elab.scheme), i.elab.term.clone())
    }));
    SysfFile { items, main: None }
}

/// Γ for the prims and all defs of a checked program.
pub fn program_type_env(p: &Program, checked: &CheckedProgram) -> TypeEnv {
    let mut env = p.prim_env();
    for i in checked.items.iter().filter(|i| !i.is_check) {
        env.push_term(i.name.clone(), i.elab.scheme.clone());
    }
    env
}
