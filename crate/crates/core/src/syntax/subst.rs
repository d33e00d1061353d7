//! Type substitutions θ, one-way matching and first-order unification.

use std::collections::{BTreeMap, BTreeSet};

use super::source::SrcType;

/// Finite map from type variables to monotypes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TySubst {
    map: BTreeMap<String, SrcType>,
}

impl TySubst {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(var: impl Into<String>, ty: SrcType) -> Self {
        let mut s = Self::new();
        s.insert(var.into(), ty);
        s
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (String, SrcType)>) -> Self {
        TySubst {
            map: pairs.into_iter().collect(),
        }
    }

    pub fn insert(&mut self, var: String, ty: SrcType) {
        self.map.insert(var, ty);
    }

    pub fn get(&self, var: &str) -> Option<&SrcType> {
        self.map.get(var)
    }

    pub fn contains(&self, var: &str) -> bool {
        self.map.contains_key(var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &SrcType)> {
        self.map.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &String> {
        self.map.keys()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    /// Copy with the given variables removed from the domain.
    pub fn without(&self, vars: &[String]) -> TySubst {
        TySubst {
            map: self
                .map
                .iter()
                .filter(|(k, _)| !vars.contains(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &TySubst) -> TySubst {
        let mut map: BTreeMap<String, SrcType> = first
            .map
            .iter()
            .map(|(k, v)| (k.clone(), v.apply(self)))
            .collect();
        for (k, v) in &self.map {
            map.entry(k.clone()).or_insert_with(|| v.clone());
        }
        TySubst { map }
    }

    /// Extend an idempotent substitution with `var := ty` (ty already normalised).
    pub(crate) fn extend_idempotent(&mut self, var: &str, ty: SrcType) {
        let single = TySubst::singleton(var, ty.clone());
        for v in self.map.values_mut() {
            if v.occurs(var) {
                *v = v.apply(&single);
            }
        }
        self.map.insert(var.to_string(), ty);
    }

    /// Variables occurring in the range.
    pub fn range_ftv(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for t in self.map.values() {
            t.collect_ftv(&mut out);
        }
        out
    }
}

/// One-way matching: find θ over `vars` with θ(pattern) = target, extending `theta`.
pub fn match_type(
    pattern: &SrcType,
    target: &SrcType,
    vars: &BTreeSet<String>,
    theta: &mut TySubst,
) -> bool {
    match (pattern, target) {
        (SrcType::Var(v), _) if vars.contains(v) => match theta.get(v) {
            Some(bound) => bound == target,
            None => {
                theta.insert(v.clone(), target.clone());
                true
            }
        },
        (SrcType::Var(v), SrcType::Var(w)) => v == w,
        (SrcType::Arrow(a1, b1), SrcType::Arrow(a2, b2)) => {
            match_type(a1, a2, vars, theta) && match_type(b1, b2, vars, theta)
        }
        (SrcType::Dict(c1, a1), SrcType::Dict(c2, a2)) => {
            c1 == c2 && match_type(a1, a2, vars, theta)
        }
        (SrcType::Con(c1, xs), SrcType::Con(c2, ys)) => {
            c1 == c2
                && xs.len() == ys.len()
                && xs
                    .iter()
                    .zip(ys)
                    .all(|(x, y)| match_type(x, y, vars, theta))
        }
        _ => false,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnifyFailure {
    Mismatch(SrcType, SrcType),
    Occurs(String, SrcType),
}

/// Unify `a` and `b`, binding only variables for which `flexible` holds.
/// `theta` is idempotent before and after.
pub fn unify_with(
    a: &SrcType,
    b: &SrcType,
    flexible: &dyn Fn(&str) -> bool,
    theta: &mut TySubst,
) -> Result<(), UnifyFailure> {
    let a = a.apply(theta);
    let b = b.apply(theta);
    match (&a, &b) {
        (SrcType::Var(x), SrcType::Var(y)) if x == y => Ok(()),
        (SrcType::Var(x), _) if flexible(x) => bind(x, &b, theta),
        (_, SrcType::Var(y)) if flexible(y) => bind(y, &a, theta),
        (SrcType::Arrow(a1, b1), SrcType::Arrow(a2, b2)) => {
            unify_with(a1, a2, flexible, theta)?;
            unify_with(b1, b2, flexible, theta)
        }
        (SrcType::Dict(c1, x), SrcType::Dict(c2, y)) if c1 == c2 => {
            unify_with(x, y, flexible, theta)
        }
        (SrcType::Con(c1, xs), SrcType::Con(c2, ys)) if c1 == c2 && xs.len() == ys.len() => {
            for (x, y) in xs.iter().zip(ys) {
                unify_with(x, y, flexible, theta)?;
            }
            Ok(())
        }
        _ => Err(UnifyFailure::Mismatch(a, b)),
    }
}

fn bind(var: &str, ty: &SrcType, theta: &mut TySubst) -> Result<(), UnifyFailure> {
    if ty.occurs(var) {
        return Err(UnifyFailure::Occurs(var.to_string(), ty.clone()));
    }
    theta.extend_idempotent(var, ty.clone());
    Ok(())
}

/// Most general unifier treating every variable as flexible.
pub fn unify_types(a: &SrcType, b: &SrcType) -> Option<TySubst> {
    let mut theta = TySubst::new();
    unify_with(a, b, &|_| true, &mut theta).ok()?;
    Some(theta)
}
