//! Target calculus: System F with opaque dictionary types.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::fresh::fresh_variant;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TargetType {
    Var(String),
    Arrow(Box<TargetType>, Box<TargetType>),
    Forall(String, Box<TargetType>),
    Dict(String, Box<TargetType>),
    Con(String, Vec<TargetType>),
}

impl TargetType {
    pub fn var(name: impl Into<String>) -> Self {
        TargetType::Var(name.into())
    }

    pub fn base(name: impl Into<String>) -> Self {
        TargetType::Con(name.into(), Vec::new())
    }

    pub fn con(name: impl Into<String>, args: Vec<TargetType>) -> Self {
        TargetType::Con(name.into(), args)
    }

    pub fn arrow(dom: TargetType, cod: TargetType) -> Self {
        TargetType::Arrow(Box::new(dom), Box::new(cod))
    }

    pub fn arrows(args: impl IntoIterator<Item = TargetType>, result: TargetType) -> Self {
        let args: Vec<_> = args.into_iter().collect();
        args.into_iter()
            .rev()
            .fold(result, |acc, a| TargetType::arrow(a, acc))
    }

    pub fn forall(binder: impl Into<String>, body: TargetType) -> Self {
        TargetType::Forall(binder.into(), Box::new(body))
    }

    pub fn foralls(binders: impl IntoIterator<Item = String>, body: TargetType) -> Self {
        let binders: Vec<_> = binders.into_iter().collect();
        binders
            .into_iter()
            .rev()
            .fold(body, |acc, b| TargetType::Forall(b, Box::new(acc)))
    }

    pub fn dict(class: impl Into<String>, arg: TargetType) -> Self {
        TargetType::Dict(class.into(), Box::new(arg))
    }

    pub fn ftv(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_ftv(&mut Vec::new(), &mut out);
        out
    }

    fn collect_ftv(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            TargetType::Var(v) => {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
            TargetType::Arrow(a, b) => {
                a.collect_ftv(bound, out);
                b.collect_ftv(bound, out);
            }
            TargetType::Forall(x, body) => {
                bound.push(x.clone());
                body.collect_ftv(bound, out);
                bound.pop();
            }
            TargetType::Dict(_, a) => a.collect_ftv(bound, out),
            TargetType::Con(_, args) => args.iter().for_each(|a| a.collect_ftv(bound, out)),
        }
    }

    /// All variable names, free or bound.
    pub fn all_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            TargetType::Var(v) => {
                out.insert(v.clone());
            }
            TargetType::Arrow(a, b) => {
                a.all_vars(out);
                b.all_vars(out);
            }
            TargetType::Forall(x, body) => {
                out.insert(x.clone());
                body.all_vars(out);
            }
            TargetType::Dict(_, a) => a.all_vars(out),
            TargetType::Con(_, args) => args.iter().for_each(|a| a.all_vars(out)),
        }
    }

    /// Capture-avoiding simultaneous substitution of type variables.
    pub fn subst(&self, map: &BTreeMap<String, TargetType>) -> TargetType {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            TargetType::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            TargetType::Arrow(a, b) => TargetType::arrow(a.subst(map), b.subst(map)),
            TargetType::Dict(c, a) => TargetType::Dict(c.clone(), Box::new(a.subst(map))),
            TargetType::Con(c, args) => {
                TargetType::Con(c.clone(), args.iter().map(|a| a.subst(map)).collect())
            }
            TargetType::Forall(x, body) => {
                let mut inner = map.clone();
                inner.remove(x);
                if inner.is_empty() {
                    return self.clone();
                }
                let body_ftv = body.ftv();
                let range_ftv: BTreeSet<String> = inner
                    .iter()
                    .filter(|(k, _)| body_ftv.contains(*k))
                    .flat_map(|(_, t)| t.ftv())
                    .collect();
                if range_ftv.contains(x) {
                    let mut avoid = range_ftv;
                    avoid.extend(body_ftv);
                    avoid.extend(inner.keys().cloned());
                    let fresh = fresh_variant(x, &avoid);
                    inner.insert(x.clone(), TargetType::Var(fresh.clone()));
                    TargetType::Forall(fresh, Box::new(body.subst(&inner)))
                } else {
                    TargetType::Forall(x.clone(), Box::new(body.subst(&inner)))
                }
            }
        }
    }

    /// Substitution that ignores binders: only meaningful when no key is
    /// ever bound, as for unification variables.
    pub fn replace_vars(&self, map: &BTreeMap<String, TargetType>) -> TargetType {
        match self {
            TargetType::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            TargetType::Arrow(a, b) => TargetType::arrow(a.replace_vars(map), b.replace_vars(map)),
            TargetType::Dict(c, a) => TargetType::Dict(c.clone(), Box::new(a.replace_vars(map))),
            TargetType::Con(c, args) => {
                TargetType::Con(c.clone(), args.iter().map(|a| a.replace_vars(map)).collect())
            }
            TargetType::Forall(x, body) => TargetType::Forall(x.clone(), Box::new(body.replace_vars(map))),
        }
    }

    pub fn subst1(&self, var: &str, ty: &TargetType) -> TargetType {
        self.subst(&BTreeMap::from([(var.to_string(), ty.clone())]))
    }

    pub fn alpha_eq(&self, other: &TargetType) -> bool {
        alpha_eq_types(self, other, &mut Vec::new(), &mut Vec::new())
    }
}

fn bound_index(stack: &[String], name: &str) -> Option<usize> {
    stack.iter().rev().position(|n| n == name)
}

fn alpha_eq_types(
    a: &TargetType,
    b: &TargetType,
    env_a: &mut Vec<String>,
    env_b: &mut Vec<String>,
) -> bool {
    match (a, b) {
        (TargetType::Var(x), TargetType::Var(y)) => {
            match (bound_index(env_a, x), bound_index(env_b, y)) {
                (Some(i), Some(j)) => i == j,
                (None, None) => x == y,
                _ => false,
            }
        }
        (TargetType::Arrow(a1, b1), TargetType::Arrow(a2, b2)) => {
            alpha_eq_types(a1, a2, env_a, env_b) && alpha_eq_types(b1, b2, env_a, env_b)
        }
        (TargetType::Dict(c1, x), TargetType::Dict(c2, y)) => {
            c1 == c2 && alpha_eq_types(x, y, env_a, env_b)
        }
        (TargetType::Con(c1, xs), TargetType::Con(c2, ys)) => {
            c1 == c2
                && xs.len() == ys.len()
                && xs
                    .iter()
                    .zip(ys)
                    .all(|(x, y)| alpha_eq_types(x, y, env_a, env_b))
        }
        (TargetType::Forall(x, bx), TargetType::Forall(y, by)) => {
            env_a.push(x.clone());
            env_b.push(y.clone());
            let r = alpha_eq_types(bx, by, env_a, env_b);
            env_a.pop();
            env_b.pop();
            r
        }
        _ => false,
    }
}

/// System F terms. Evidence terms are the sublanguage recognised by
/// [`TargetTerm::is_evidence`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TargetTerm {
    Var(String),
    Lam(String, TargetType, Box<TargetTerm>),
    App(Box<TargetTerm>, Box<TargetTerm>),
    TyLam(String, Box<TargetTerm>),
    TyApp(Box<TargetTerm>, TargetType),
}

impl TargetTerm {
    pub fn var(name: impl Into<String>) -> Self {
        TargetTerm::Var(name.into())
    }

    pub fn lam(binder: impl Into<String>, annot: TargetType, body: TargetTerm) -> Self {
        TargetTerm::Lam(binder.into(), annot, Box::new(body))
    }

    pub fn lams(binders: impl IntoIterator<Item = (String, TargetType)>, body: TargetTerm) -> Self {
        let binders: Vec<_> = binders.into_iter().collect();
        binders
            .into_iter()
            .rev()
            .fold(body, |acc, (x, t)| TargetTerm::Lam(x, t, Box::new(acc)))
    }

    pub fn app(fun: TargetTerm, arg: TargetTerm) -> Self {
        TargetTerm::App(Box::new(fun), Box::new(arg))
    }

    pub fn apps(fun: TargetTerm, args: impl IntoIterator<Item = TargetTerm>) -> Self {
        args.into_iter().fold(fun, TargetTerm::app)
    }

    pub fn ty_lam(binder: impl Into<String>, body: TargetTerm) -> Self {
        TargetTerm::TyLam(binder.into(), Box::new(body))
    }

    pub fn ty_lams(binders: impl IntoIterator<Item = String>, body: TargetTerm) -> Self {
        let binders: Vec<_> = binders.into_iter().collect();
        binders
            .into_iter()
            .rev()
            .fold(body, |acc, b| TargetTerm::TyLam(b, Box::new(acc)))
    }

    pub fn ty_app(fun: TargetTerm, ty: TargetType) -> Self {
        TargetTerm::TyApp(Box::new(fun), ty)
    }

    pub fn ty_apps(fun: TargetTerm, tys: impl IntoIterator<Item = TargetType>) -> Self {
        tys.into_iter().fold(fun, TargetTerm::ty_app)
    }

    /// `d | tev ῡ t̄ev`: a variable applied to types, then to evidence terms.
    pub fn is_evidence(&self) -> bool {
        fn go(t: &TargetTerm, below_ty_app: bool) -> bool {
            match t {
                TargetTerm::Var(_) => true,
                TargetTerm::TyApp(f, _) => go(f, true),
                TargetTerm::App(f, a) => !below_ty_app && a.is_evidence() && go(f, false),
                _ => false,
            }
        }
        go(self, false)
    }

    /// Free term variables.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_fv(&mut Vec::new(), &mut out);
        out
    }

    fn collect_fv(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            TargetTerm::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            TargetTerm::Lam(x, _, body) => {
                bound.push(x.clone());
                body.collect_fv(bound, out);
                bound.pop();
            }
            TargetTerm::App(f, a) => {
                f.collect_fv(bound, out);
                a.collect_fv(bound, out);
            }
            TargetTerm::TyLam(_, body) => body.collect_fv(bound, out),
            TargetTerm::TyApp(f, _) => f.collect_fv(bound, out),
        }
    }

    /// Free type variables (in annotations and type arguments).
    pub fn free_tyvars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_ftv(&mut Vec::new(), &mut out);
        out
    }

    fn collect_ftv(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let add = |ty: &TargetType, bound: &Vec<String>, out: &mut BTreeSet<String>| {
            for v in ty.ftv() {
                if !bound.contains(&v) {
                    out.insert(v);
                }
            }
        };
        match self {
            TargetTerm::Var(_) => {}
            TargetTerm::Lam(_, ty, body) => {
                add(ty, bound, out);
                body.collect_ftv(bound, out);
            }
            TargetTerm::App(f, a) => {
                f.collect_ftv(bound, out);
                a.collect_ftv(bound, out);
            }
            TargetTerm::TyLam(b, body) => {
                bound.push(b.clone());
                body.collect_ftv(bound, out);
                bound.pop();
            }
            TargetTerm::TyApp(f, ty) => {
                f.collect_ftv(bound, out);
                add(ty, bound, out);
            }
        }
    }

    /// Every term-variable name occurring anywhere, bound or free.
    pub fn all_term_names(&self, out: &mut BTreeSet<String>) {
        match self {
            TargetTerm::Var(x) => {
                out.insert(x.clone());
            }
            TargetTerm::Lam(x, _, body) => {
                out.insert(x.clone());
                body.all_term_names(out);
            }
            TargetTerm::App(f, a) => {
                f.all_term_names(out);
                a.all_term_names(out);
            }
            TargetTerm::TyLam(_, body) | TargetTerm::TyApp(body, _) => body.all_term_names(out),
        }
    }

    /// Every type-variable name occurring anywhere, bound or free.
    pub fn all_type_names(&self, out: &mut BTreeSet<String>) {
        match self {
            TargetTerm::Var(_) => {}
            TargetTerm::Lam(_, ty, body) => {
                ty.all_vars(out);
                body.all_type_names(out);
            }
            TargetTerm::App(f, a) => {
                f.all_type_names(out);
                a.all_type_names(out);
            }
            TargetTerm::TyLam(b, body) => {
                out.insert(b.clone());
                body.all_type_names(out);
            }
            TargetTerm::TyApp(f, ty) => {
                f.all_type_names(out);
                ty.all_vars(out);
            }
        }
    }

    /// Capture-avoiding substitution of type variables throughout the term.
    pub fn subst_types(&self, map: &BTreeMap<String, TargetType>) -> TargetTerm {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            TargetTerm::Var(_) => self.clone(),
            TargetTerm::Lam(x, ty, body) => {
                TargetTerm::Lam(x.clone(), ty.subst(map), Box::new(body.subst_types(map)))
            }
            TargetTerm::App(f, a) => TargetTerm::app(f.subst_types(map), a.subst_types(map)),
            TargetTerm::TyApp(f, ty) => TargetTerm::ty_app(f.subst_types(map), ty.subst(map)),
            TargetTerm::TyLam(b, body) => {
                let mut inner = map.clone();
                inner.remove(b);
                if inner.is_empty() {
                    return self.clone();
                }
                let range_ftv: BTreeSet<String> =
                    inner.values().flat_map(|t| t.ftv()).collect();
                if range_ftv.contains(b) {
                    let mut avoid = range_ftv;
                    body.all_type_names(&mut avoid);
                    avoid.extend(inner.keys().cloned());
                    let fresh = fresh_variant(b, &avoid);
                    inner.insert(b.clone(), TargetType::Var(fresh.clone()));
                    TargetTerm::TyLam(fresh, Box::new(body.subst_types(&inner)))
                } else {
                    TargetTerm::TyLam(b.clone(), Box::new(body.subst_types(&inner)))
                }
            }
        }
    }

    /// [`TargetType::replace_vars`] on every type in the term.
    pub fn replace_type_vars(&self, map: &BTreeMap<String, TargetType>) -> TargetTerm {
        match self {
            TargetTerm::Var(_) => self.clone(),
            TargetTerm::Lam(x, ty, body) => TargetTerm::Lam(
                x.clone(),
                ty.replace_vars(map),
                Box::new(body.replace_type_vars(map)),
            ),
            TargetTerm::App(f, a) => TargetTerm::app(f.replace_type_vars(map), a.replace_type_vars(map)),
            TargetTerm::TyApp(f, ty) => TargetTerm::ty_app(f.replace_type_vars(map), ty.replace_vars(map)),
            TargetTerm::TyLam(b, body) => TargetTerm::TyLam(b.clone(), Box::new(body.replace_type_vars(map))),
        }
    }

    /// Capture-avoiding simultaneous substitution of term variables.
    pub fn subst_terms(&self, map: &BTreeMap<String, TargetTerm>) -> TargetTerm {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            TargetTerm::Var(x) => map.get(x).cloned().unwrap_or_else(|| self.clone()),
            TargetTerm::App(f, a) => TargetTerm::app(f.subst_terms(map), a.subst_terms(map)),
            TargetTerm::TyApp(f, ty) => TargetTerm::ty_app(f.subst_terms(map), ty.clone()),
            TargetTerm::Lam(x, ty, body) => {
                let mut inner = map.clone();
                inner.remove(x);
                if inner.is_empty() {
                    return self.clone();
                }
                let body_fv = body.free_vars();
                let range_fv: BTreeSet<String> = inner
                    .iter()
                    .filter(|(k, _)| body_fv.contains(*k))
                    .flat_map(|(_, t)| t.free_vars())
                    .collect();
                if range_fv.contains(x) {
                    let mut avoid = range_fv;
                    body.all_term_names(&mut avoid);
                    avoid.extend(inner.keys().cloned());
                    let fresh = fresh_variant(x, &avoid);
                    inner.insert(x.clone(), TargetTerm::Var(fresh.clone()));
                    TargetTerm::Lam(fresh, ty.clone(), Box::new(body.subst_terms(&inner)))
                } else {
                    TargetTerm::Lam(x.clone(), ty.clone(), Box::new(body.subst_terms(&inner)))
                }
            }
            TargetTerm::TyLam(b, body) => {
                let range_ftv: BTreeSet<String> =
                    map.values().flat_map(|t| t.free_tyvars()).collect();
                if range_ftv.contains(b) {
                    let mut avoid = range_ftv;
                    body.all_type_names(&mut avoid);
                    let fresh = fresh_variant(b, &avoid);
                    let renamed =
                        body.subst_types(&BTreeMap::from([(b.clone(), TargetType::Var(fresh.clone()))]));
                    TargetTerm::TyLam(fresh, Box::new(renamed.subst_terms(map)))
                } else {
                    TargetTerm::TyLam(b.clone(), Box::new(body.subst_terms(map)))
                }
            }
        }
    }

    pub fn alpha_eq(&self, other: &TargetTerm) -> bool {
        alpha_eq_terms(self, other, &mut AlphaEnv::default(), &mut AlphaEnv::default())
    }

    /// Node count.
    pub fn size(&self) -> usize {
        match self {
            TargetTerm::Var(_) => 1,
            TargetTerm::Lam(_, _, b) | TargetTerm::TyLam(_, b) | TargetTerm::TyApp(b, _) => {
                1 + b.size()
            }
            TargetTerm::App(f, a) => 1 + f.size() + a.size(),
        }
    }

    /// Split `h a1 ... an` (type and term arguments) into head and spine.
    pub fn spine(&self) -> (&TargetTerm, Vec<SpineArg<'_>>) {
        let mut args = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                TargetTerm::App(f, a) => {
                    args.push(SpineArg::Term(a));
                    cur = f;
                }
                TargetTerm::TyApp(f, t) => {
                    args.push(SpineArg::Type(t));
                    cur = f;
                }
                _ => break,
            }
        }
        args.reverse();
        (cur, args)
    }
}

#[derive(Debug, Clone, Copy)]
pub enum SpineArg<'a> {
    Term(&'a TargetTerm),
    Type(&'a TargetType),
}

#[derive(Default)]
struct AlphaEnv {
    terms: Vec<String>,
    types: Vec<String>,
}

fn alpha_eq_terms(a: &TargetTerm, b: &TargetTerm, ea: &mut AlphaEnv, eb: &mut AlphaEnv) -> bool {
    match (a, b) {
        (TargetTerm::Var(x), TargetTerm::Var(y)) => {
            match (bound_index(&ea.terms, x), bound_index(&eb.terms, y)) {
                (Some(i), Some(j)) => i == j,
                (None, None) => x == y,
                _ => false,
            }
        }
        (TargetTerm::Lam(x, tx, bx), TargetTerm::Lam(y, ty, by)) => {
            if !alpha_eq_types(tx, ty, &mut ea.types, &mut eb.types) {
                return false;
            }
            ea.terms.push(x.clone());
            eb.terms.push(y.clone());
            let r = alpha_eq_terms(bx, by, ea, eb);
            ea.terms.pop();
            eb.terms.pop();
            r
        }
        (TargetTerm::App(f1, a1), TargetTerm::App(f2, a2)) => {
            alpha_eq_terms(f1, f2, ea, eb) && alpha_eq_terms(a1, a2, ea, eb)
        }
        (TargetTerm::TyLam(x, bx), TargetTerm::TyLam(y, by)) => {
            ea.types.push(x.clone());
            eb.types.push(y.clone());
            let r = alpha_eq_terms(bx, by, ea, eb);
            ea.types.pop();
            eb.types.pop();
            r
        }
        (TargetTerm::TyApp(f1, t1), TargetTerm::TyApp(f2, t2)) => {
            alpha_eq_terms(f1, f2, ea, eb) && alpha_eq_types(t1, t2, &mut ea.types, &mut eb.types)
        }
        _ => false,
    }
}

/// η: dictionary-evidence substitution.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EvSubst {
    map: BTreeMap<String, TargetTerm>,
}

impl EvSubst {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(var: impl Into<String>, ev: TargetTerm) -> Self {
        let mut s = Self::new();
        s.insert(var, ev);
        s
    }

    pub fn insert(&mut self, var: impl Into<String>, ev: TargetTerm) {
        debug_assert!(ev.is_evidence(), "not an evidence term: {ev:?}");
        self.map.insert(var.into(), ev);
    }

    /// Insert an arbitrary term (dictionary arguments need not be evidence terms).
    pub fn insert_term(&mut self, var: impl Into<String>, term: TargetTerm) {
        self.map.insert(var.into(), term);
    }

    pub fn get(&self, var: &str) -> Option<&TargetTerm> {
        self.map.get(var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &TargetTerm)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn as_map(&self) -> &BTreeMap<String, TargetTerm> {
        &self.map
    }

    /// `η(t)`: capture-avoiding replacement of free evidence variables.
    pub fn apply(&self, t: &TargetTerm) -> TargetTerm {
        t.subst_terms(&self.map)
    }

    /// `other ∘ self` on images: first `self`, then `other` applied to each image.
    pub fn then(&self, other: &EvSubst) -> EvSubst {
        let mut map: BTreeMap<String, TargetTerm> = self
            .map
            .iter()
            .map(|(k, v)| (k.clone(), other.apply(v)))
            .collect();
        for (k, v) in &other.map {
            map.entry(k.clone()).or_insert_with(|| v.clone());
        }
        EvSubst { map }
    }
}

impl FromIterator<(String, TargetTerm)> for EvSubst {
    fn from_iter<I: IntoIterator<Item = (String, TargetTerm)>>(iter: I) -> Self {
        EvSubst {
            map: iter.into_iter().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TargetEnvEntry {
    Term(String, TargetType),
    TyVar(String),
}

/// Γυ: value bindings interleaved with type variables. Lookup is innermost-first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TargetEnv {
    entries: Vec<TargetEnvEntry>,
}

impl TargetEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_term(mut self, name: impl Into<String>, ty: TargetType) -> Self {
        self.push_term(name, ty);
        self
    }

    pub fn with_tyvar(mut self, name: impl Into<String>) -> Self {
        self.push_tyvar(name);
        self
    }

    pub fn push_term(&mut self, name: impl Into<String>, ty: TargetType) {
        self.entries.push(TargetEnvEntry::Term(name.into(), ty));
    }

    pub fn push_tyvar(&mut self, name: impl Into<String>) {
        self.entries.push(TargetEnvEntry::TyVar(name.into()));
    }

    pub fn pop(&mut self) -> Option<TargetEnvEntry> {
        self.entries.pop()
    }

    pub fn append(&mut self, other: &TargetEnv) {
        self.entries.extend(other.entries.iter().cloned());
    }

    pub fn lookup(&self, name: &str) -> Option<&TargetType> {
        self.entries.iter().rev().find_map(|e| match e {
            TargetEnvEntry::Term(x, t) if x == name => Some(t),
            _ => None,
        })
    }

    pub fn has_tyvar(&self, name: &str) -> bool {
        self.entries
            .iter()
            .any(|e| matches!(e, TargetEnvEntry::TyVar(a) if a == name))
    }

    pub fn entries(&self) -> &[TargetEnvEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn term_names(&self) -> impl Iterator<Item = &String> {
        self.entries.iter().filter_map(|e| match e {
            TargetEnvEntry::Term(x, _) => Some(x),
            _ => None,
        })
    }
}

impl fmt::Display for TargetType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::surface::pretty_target_type(self))
    }
}

impl fmt::Display for TargetTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::surface::pretty_target(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tv(n: &str) -> TargetType {
        TargetType::var(n)
    }

    #[test]
    fn alpha_eq_polymorphic_identity() {
        let id_a = TargetTerm::ty_lam("a", TargetTerm::lam("x", tv("a"), TargetTerm::var("x")));
        let id_b = TargetTerm::ty_lam("b", TargetTerm::lam("y", tv("b"), TargetTerm::var("y")));
        assert!(id_a.alpha_eq(&id_b));
    }

    #[test]
    fn alpha_eq_sees_annotations() {
        let l = TargetTerm::lam("x", TargetType::base("Int"), TargetTerm::var("x"));
        let r = TargetTerm::lam("x", TargetType::base("Bool"), TargetTerm::var("x"));
        assert!(!l.alpha_eq(&r));
    }

    #[test]
    fn alpha_eq_distinguishes_free_vars() {
        assert!(!TargetTerm::var("d").alpha_eq(&TargetTerm::var("d'")));
        assert!(TargetTerm::var("d").alpha_eq(&TargetTerm::var("d")));
    }

    #[test]
    fn bound_and_free_never_equal() {
        let l = TargetTerm::lam("x", tv("a"), TargetTerm::var("x"));
        let r = TargetTerm::lam("y", tv("a"), TargetTerm::var("x"));
        assert!(!l.alpha_eq(&r));
    }

    #[test]
    fn evidence_recognizer() {
        let ev = TargetTerm::app(
            TargetTerm::ty_app(TargetTerm::var("$fEqList"), TargetType::base("Int")),
            TargetTerm::var("$fEqInt"),
        );
        assert!(ev.is_evidence());
        assert!(TargetTerm::var("d").is_evidence());
        let bad = TargetTerm::lam("x", tv("a"), TargetTerm::var("x"));
        assert!(!bad.is_evidence());
        // type argument after an evidence argument is outside the grammar
        let late = TargetTerm::ty_app(
            TargetTerm::app(TargetTerm::var("f"), TargetTerm::var("d")),
            tv("a"),
        );
        assert!(!late.is_evidence());
    }

    #[test]
    fn evsubst_replaces_free_dictionary() {
        // [d' ↦ $fEqMaybe a d]((==) (Maybe a) d' x x)
        let maybe_a = TargetType::con("Maybe", vec![tv("a")]);
        let t = TargetTerm::apps(
            TargetTerm::ty_app(TargetTerm::var("=="), maybe_a.clone()),
            [TargetTerm::var("d'"), TargetTerm::var("x"), TargetTerm::var("x")],
        );
        let ev = TargetTerm::app(
            TargetTerm::ty_app(TargetTerm::var("$fEqMaybe"), tv("a")),
            TargetTerm::var("d"),
        );
        let eta = EvSubst::singleton("d'", ev.clone());
        let expected = TargetTerm::apps(
            TargetTerm::ty_app(TargetTerm::var("=="), maybe_a),
            [ev, TargetTerm::var("x"), TargetTerm::var("x")],
        );
        assert_eq!(eta.apply(&t), expected);
        assert_eq!(EvSubst::new().apply(&t), t);
    }

    #[test]
    fn evsubst_avoids_capture() {
        // [d ↦ e](λ(e:T). d) must rename the binder.
        let t = TargetTerm::lam("e", tv("a"), TargetTerm::var("d"));
        let r = EvSubst::singleton("d", TargetTerm::var("e")).apply(&t);
        match r {
            TargetTerm::Lam(x, _, body) => {
                assert_ne!(x, "e");
                assert_eq!(*body, TargetTerm::var("e"));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn type_subst_avoids_capture_under_tylam() {
        // [b ↦ a](Λa. λ(x:b). x)
        let t = TargetTerm::ty_lam("a", TargetTerm::lam("x", tv("b"), TargetTerm::var("x")));
        let r = t.subst_types(&BTreeMap::from([("b".to_string(), tv("a"))]));
        match &r {
            TargetTerm::TyLam(bnd, body) => {
                assert_ne!(bnd, "a");
                assert_eq!(**body, TargetTerm::lam("x", tv("a"), TargetTerm::var("x")));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn forall_subst_avoids_capture() {
        let t = TargetType::forall("a", TargetType::arrow(tv("a"), tv("b")));
        let r = t.subst1("b", &tv("a"));
        assert!(!r.alpha_eq(&TargetType::forall("a", TargetType::arrow(tv("a"), tv("a")))));
        assert!(r.alpha_eq(&TargetType::forall("c", TargetType::arrow(tv("c"), tv("a")))));
    }
}
