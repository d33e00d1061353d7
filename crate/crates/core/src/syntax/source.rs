//! Source-language syntax: monotypes, constraints, qualified types, schemes,
//! axiom schemes, expressions and typing environments.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::subst::{match_type, unify_types, TySubst};

/// Monotypes. `Con` covers opaque type constructors such as `Int` or `Maybe`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SrcType {
    Var(String),
    Arrow(Box<SrcType>, Box<SrcType>),
    Dict(String, Box<SrcType>),
    Con(String, Vec<SrcType>),
}

impl SrcType {
    pub fn var(name: impl Into<String>) -> Self {
        SrcType::Var(name.into())
    }

    pub fn con(name: impl Into<String>, args: Vec<SrcType>) -> Self {
        SrcType::Con(name.into(), args)
    }

    /// Nullary constructor, e.g. `Int`.
    pub fn base(name: impl Into<String>) -> Self {
        SrcType::Con(name.into(), Vec::new())
    }

    pub fn arrow(dom: SrcType, cod: SrcType) -> Self {
        SrcType::Arrow(Box::new(dom), Box::new(cod))
    }

    /// Right-nested arrow `a1 -> ... -> an -> result`.
    pub fn arrows(args: impl IntoIterator<Item = SrcType>, result: SrcType) -> Self {
        let args: Vec<_> = args.into_iter().collect();
        args.into_iter()
            .rev()
            .fold(result, |acc, arg| SrcType::arrow(arg, acc))
    }

    pub fn dict(class: impl Into<String>, arg: SrcType) -> Self {
        SrcType::Dict(class.into(), Box::new(arg))
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            SrcType::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn ftv(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_ftv(&mut out);
        out
    }

    pub(crate) fn collect_ftv(&self, out: &mut BTreeSet<String>) {
        match self {
            SrcType::Var(v) => {
                out.insert(v.clone());
            }
            SrcType::Arrow(a, b) => {
                a.collect_ftv(out);
                b.collect_ftv(out);
            }
            SrcType::Dict(_, a) => a.collect_ftv(out),
            SrcType::Con(_, args) => args.iter().for_each(|a| a.collect_ftv(out)),
        }
    }

    /// Free variables in first-occurrence order (left to right).
    pub fn ftv_ordered(&self, out: &mut Vec<String>) {
        match self {
            SrcType::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            SrcType::Arrow(a, b) => {
                a.ftv_ordered(out);
                b.ftv_ordered(out);
            }
            SrcType::Dict(_, a) => a.ftv_ordered(out),
            SrcType::Con(_, args) => args.iter().for_each(|a| a.ftv_ordered(out)),
        }
    }

    pub fn occurs(&self, var: &str) -> bool {
        match self {
            SrcType::Var(v) => v == var,
            SrcType::Arrow(a, b) => a.occurs(var) || b.occurs(var),
            SrcType::Dict(_, a) => a.occurs(var),
            SrcType::Con(_, args) => args.iter().any(|a| a.occurs(var)),
        }
    }

    pub fn apply(&self, theta: &TySubst) -> SrcType {
        match self {
            SrcType::Var(v) => theta.get(v).cloned().unwrap_or_else(|| self.clone()),
            SrcType::Arrow(a, b) => SrcType::arrow(a.apply(theta), b.apply(theta)),
            SrcType::Dict(c, a) => SrcType::Dict(c.clone(), Box::new(a.apply(theta))),
            SrcType::Con(c, args) => {
                SrcType::Con(c.clone(), args.iter().map(|a| a.apply(theta)).collect())
            }
        }
    }
}

/// A class constraint `TC τ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint {
    pub class: String,
    pub arg: SrcType,
}

impl Constraint {
    pub fn new(class: impl Into<String>, arg: SrcType) -> Self {
        Constraint {
            class: class.into(),
            arg,
        }
    }

    pub fn ftv(&self) -> BTreeSet<String> {
        self.arg.ftv()
    }

    pub fn apply(&self, theta: &TySubst) -> Constraint {
        Constraint::new(self.class.clone(), self.arg.apply(theta))
    }

    /// True when the argument is a bare type variable.
    pub fn is_var_headed(&self) -> bool {
        matches!(self.arg, SrcType::Var(_))
    }
}

/// `C1 => ... => Cn => τ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QualType {
    pub context: Vec<Constraint>,
    pub body: SrcType,
}

impl QualType {
    pub fn new(context: Vec<Constraint>, body: SrcType) -> Self {
        QualType { context, body }
    }

    pub fn mono(body: SrcType) -> Self {
        QualType::new(Vec::new(), body)
    }

    pub fn ftv(&self) -> BTreeSet<String> {
        let mut out = self.body.ftv();
        for c in &self.context {
            c.arg.collect_ftv(&mut out);
        }
        out
    }

    pub fn apply(&self, theta: &TySubst) -> QualType {
        QualType {
            context: self.context.iter().map(|c| c.apply(theta)).collect(),
            body: self.body.apply(theta),
        }
    }
}

/// `∀ā. ρ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scheme {
    pub quantified: Vec<String>,
    pub qual: QualType,
}

impl Scheme {
    pub fn new(quantified: Vec<String>, context: Vec<Constraint>, body: SrcType) -> Self {
        Scheme {
            quantified,
            qual: QualType::new(context, body),
        }
    }

    pub fn mono(body: SrcType) -> Self {
        Scheme::new(Vec::new(), Vec::new(), body)
    }

    pub fn context(&self) -> &[Constraint] {
        &self.qual.context
    }

    pub fn body(&self) -> &SrcType {
        &self.qual.body
    }

    pub fn ftv(&self) -> BTreeSet<String> {
        let mut out = self.qual.ftv();
        for q in &self.quantified {
            out.remove(q);
        }
        out
    }

    /// Capture-avoiding substitution; quantified variables shadow `theta`.
    pub fn apply(&self, theta: &TySubst) -> Scheme {
        let mut inner = theta.without(&self.quantified);
        let free_in_range: BTreeSet<String> = inner
            .iter()
            .filter(|(v, _)| self.qual.ftv().contains(*v))
            .flat_map(|(_, t)| t.ftv())
            .collect();
        let mut avoid: BTreeSet<String> = free_in_range.clone();
        avoid.extend(self.qual.ftv());
        avoid.extend(inner.domain().cloned());
        let mut quantified = Vec::with_capacity(self.quantified.len());
        let mut rename = TySubst::new();
        for q in &self.quantified {
            if free_in_range.contains(q) {
                let fresh = super::fresh::fresh_variant(q, &avoid);
                avoid.insert(fresh.clone());
                rename.insert(q.clone(), SrcType::Var(fresh.clone()));
                quantified.push(fresh);
            } else {
                quantified.push(q.clone());
            }
        }
        for (k, v) in rename.iter() {
            inner.insert(k.clone(), v.clone());
        }
        Scheme {
            quantified,
            qual: self.qual.apply(&inner),
        }
    }

    /// Rename every quantified variable so none appears in `avoid`.
    pub fn freshen(&self, avoid: &BTreeSet<String>) -> Scheme {
        let mut taken = avoid.clone();
        taken.extend(self.qual.ftv());
        let mut theta = TySubst::new();
        let mut quantified = Vec::new();
        for q in &self.quantified {
            if avoid.contains(q) {
                let fresh = super::fresh::fresh_variant(q, &taken);
                taken.insert(fresh.clone());
                theta.insert(q.clone(), SrcType::Var(fresh.clone()));
                quantified.push(fresh);
            } else {
                quantified.push(q.clone());
            }
        }
        Scheme {
            quantified,
            qual: self.qual.apply(&theta),
        }
    }
}

/// Flattened conjunction `d1 : C1 ∧ ... ∧ dn : Cn`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LabelledConstraints {
    entries: Vec<(String, Constraint)>,
}

impl LabelledConstraints {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: Vec<(String, Constraint)>) -> Self {
        debug_assert!(
            {
                let labels: BTreeSet<_> = entries.iter().map(|(l, _)| l).collect();
                labels.len() == entries.len()
            },
            "duplicate evidence labels"
        );
        LabelledConstraints { entries }
    }

    pub fn push(&mut self, label: impl Into<String>, c: Constraint) {
        let label = label.into();
        debug_assert!(self.get(&label).is_none(), "duplicate label {label}");
        self.entries.push((label, c));
    }

    pub fn extend(&mut self, other: &LabelledConstraints) {
        for (l, c) in other.iter() {
            self.push(l.clone(), c.clone());
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &(String, Constraint)> {
        self.entries.iter()
    }

    pub fn entries(&self) -> &[(String, Constraint)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, label: &str) -> Option<&Constraint> {
        self.entries.iter().find(|(l, _)| l == label).map(|(_, c)| c)
    }

    pub fn labels(&self) -> impl Iterator<Item = &String> {
        self.entries.iter().map(|(l, _)| l)
    }

    pub fn constraints(&self) -> impl Iterator<Item = &Constraint> {
        self.entries.iter().map(|(_, c)| c)
    }

    pub fn ftv(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for (_, c) in &self.entries {
            c.arg.collect_ftv(&mut out);
        }
        out
    }

    pub fn apply(&self, theta: &TySubst) -> LabelledConstraints {
        LabelledConstraints {
            entries: self
                .entries
                .iter()
                .map(|(l, c)| (l.clone(), c.apply(theta)))
                .collect(),
        }
    }
}

impl FromIterator<(String, Constraint)> for LabelledConstraints {
    fn from_iter<I: IntoIterator<Item = (String, Constraint)>>(iter: I) -> Self {
        LabelledConstraints::from_entries(iter.into_iter().collect())
    }
}

/// Instance declaration `name : ∀ā. C̄ ⇒ C`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AxiomScheme {
    pub name: String,
    pub quantified: Vec<String>,
    pub premises: Vec<Constraint>,
    pub head: Constraint,
}

impl AxiomScheme {
    pub fn new(
        name: impl Into<String>,
        quantified: Vec<String>,
        premises: Vec<Constraint>,
        head: Constraint,
    ) -> Self {
        AxiomScheme {
            name: name.into(),
            quantified,
            premises,
            head,
        }
    }

    /// Rename the quantified variables apart from `avoid`.
    pub fn freshen(&self, avoid: &BTreeSet<String>) -> AxiomScheme {
        let mut taken = avoid.clone();
        taken.extend(self.quantified.iter().cloned());
        let mut theta = TySubst::new();
        let mut quantified = Vec::new();
        for q in &self.quantified {
            let fresh = if avoid.contains(q) {
                let f = super::fresh::fresh_variant(q, &taken);
                taken.insert(f.clone());
                f
            } else {
                q.clone()
            };
            theta.insert(q.clone(), SrcType::Var(fresh.clone()));
            quantified.push(fresh);
        }
        AxiomScheme {
            name: self.name.clone(),
            quantified,
            premises: self.premises.iter().map(|c| c.apply(&theta)).collect(),
            head: self.head.apply(&theta),
        }
    }

    /// One-way match of the head against `wanted`; binds quantified variables only.
    pub fn match_head(&self, wanted: &Constraint) -> Option<TySubst> {
        if self.head.class != wanted.class {
            return None;
        }
        let vars: BTreeSet<String> = self.quantified.iter().cloned().collect();
        let mut theta = TySubst::new();
        match_type(&self.head.arg, &wanted.arg, &vars, &mut theta).then_some(theta)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AxiomError {
    #[error("duplicate instance name {0}")]
    DuplicateName(String),
    #[error("instance {name}: type variable {var} is not quantified")]
    Unscoped { name: String, var: String },
    #[error("instance {name}: quantified variable {var} does not occur in the head")]
    UndeterminedVariable { name: String, var: String },
    #[error("overlapping instances {first} and {second} for {class}")]
    Overlap {
        first: String,
        second: String,
        class: String,
    },
}

/// The top-level axiom scheme: a validated, ordered list of instances.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TopAxioms {
    axioms: Vec<AxiomScheme>,
}

impl TopAxioms {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Validates name uniqueness, scoping, head coverage and the no-overlap rule.
    pub fn new(axioms: Vec<AxiomScheme>) -> Result<Self, AxiomError> {
        let mut names = BTreeSet::new();
        for ax in &axioms {
            if !names.insert(ax.name.clone()) {
                return Err(AxiomError::DuplicateName(ax.name.clone()));
            }
            let quantified: BTreeSet<String> = ax.quantified.iter().cloned().collect();
            let mut mentioned = ax.head.ftv();
            for p in &ax.premises {
                mentioned.extend(p.ftv());
            }
            if let Some(var) = mentioned.difference(&quantified).next() {
                return Err(AxiomError::Unscoped {
                    name: ax.name.clone(),
                    var: var.clone(),
                });
            }
            let head_vars = ax.head.ftv();
            if let Some(var) = quantified.difference(&head_vars).next() {
                return Err(AxiomError::UndeterminedVariable {
                    name: ax.name.clone(),
                    var: var.clone(),
                });
            }
        }
        for (i, a) in axioms.iter().enumerate() {
            for b in &axioms[i + 1..] {
                if a.head.class != b.head.class {
                    continue;
                }
                let avoid: BTreeSet<String> = a.quantified.iter().cloned().collect();
                let b = b.freshen(&avoid);
                if unify_types(&a.head.arg, &b.head.arg).is_some() {
                    return Err(AxiomError::Overlap {
                        first: a.name.clone(),
                        second: b.name.clone(),
                        class: a.head.class.clone(),
                    });
                }
            }
        }
        Ok(TopAxioms { axioms })
    }

    pub fn iter(&self) -> impl Iterator<Item = &AxiomScheme> {
        self.axioms.iter()
    }

    pub fn as_slice(&self) -> &[AxiomScheme] {
        &self.axioms
    }

    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&AxiomScheme> {
        self.axioms.iter().find(|a| a.name == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.axioms.iter().map(|a| &a.name)
    }
}

/// Source expressions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SrcExpr {
    Var(String),
    Lam(String, Box<SrcExpr>),
    App(Box<SrcExpr>, Box<SrcExpr>),
    /// `fun [| dict as at |]`.
    DictApp {
        fun: Box<SrcExpr>,
        dict: Box<SrcExpr>,
        at: Constraint,
    },
    /// `(expr : scheme)`.
    Annot(Box<SrcExpr>, Scheme),
}

impl SrcExpr {
    pub fn var(name: impl Into<String>) -> Self {
        SrcExpr::Var(name.into())
    }

    pub fn lam(binder: impl Into<String>, body: SrcExpr) -> Self {
        SrcExpr::Lam(binder.into(), Box::new(body))
    }

    pub fn app(fun: SrcExpr, arg: SrcExpr) -> Self {
        SrcExpr::App(Box::new(fun), Box::new(arg))
    }

    pub fn apps(fun: SrcExpr, args: impl IntoIterator<Item = SrcExpr>) -> Self {
        args.into_iter().fold(fun, SrcExpr::app)
    }

    pub fn dict_app(fun: SrcExpr, dict: SrcExpr, at: Constraint) -> Self {
        SrcExpr::DictApp {
            fun: Box::new(fun),
            dict: Box::new(dict),
            at,
        }
    }

    pub fn annot(expr: SrcExpr, scheme: Scheme) -> Self {
        SrcExpr::Annot(Box::new(expr), scheme)
    }

    /// Free term variables.
    pub fn free_vars(&self) -> BTreeSet<String> {
        fn go(e: &SrcExpr, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match e {
                SrcExpr::Var(x) => {
                    if !bound.contains(x) {
                        out.insert(x.clone());
                    }
                }
                SrcExpr::Lam(x, body) => {
                    bound.push(x.clone());
                    go(body, bound, out);
                    bound.pop();
                }
                SrcExpr::App(f, a) => {
                    go(f, bound, out);
                    go(a, bound, out);
                }
                SrcExpr::DictApp { fun, dict, .. } => {
                    go(fun, bound, out);
                    go(dict, bound, out);
                }
                SrcExpr::Annot(e, _) => go(e, bound, out),
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EnvEntry {
    Term(String, Scheme),
    TyVar(String),
}

/// Γ: term bindings interleaved with bound type variables. Later entries shadow earlier ones.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeEnv {
    entries: Vec<EnvEntry>,
}

impl TypeEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_term(mut self, name: impl Into<String>, scheme: Scheme) -> Self {
        self.push_term(name, scheme);
        self
    }

    pub fn push_term(&mut self, name: impl Into<String>, scheme: Scheme) {
        self.entries.push(EnvEntry::Term(name.into(), scheme));
    }

    pub fn push_tyvar(&mut self, name: impl Into<String>) {
        self.entries.push(EnvEntry::TyVar(name.into()));
    }

    pub fn pop(&mut self) -> Option<EnvEntry> {
        self.entries.pop()
    }

    pub fn lookup(&self, name: &str) -> Option<&Scheme> {
        self.entries.iter().rev().find_map(|e| match e {
            EnvEntry::Term(x, s) if x == name => Some(s),
            _ => None,
        })
    }

    pub fn entries(&self) -> &[EnvEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Free type variables of the term bindings plus the bound type variables.
    pub fn ftv(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for e in &self.entries {
            match e {
                EnvEntry::Term(_, s) => out.extend(s.ftv()),
                EnvEntry::TyVar(a) => {
                    out.insert(a.clone());
                }
            }
        }
        out
    }

    pub fn apply(&self, theta: &TySubst) -> TypeEnv {
        TypeEnv {
            entries: self
                .entries
                .iter()
                .map(|e| match e {
                    EnvEntry::Term(x, s) => EnvEntry::Term(x.clone(), s.apply(theta)),
                    EnvEntry::TyVar(a) => EnvEntry::TyVar(a.clone()),
                })
                .collect(),
        }
    }
}

impl fmt::Display for SrcType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::surface::pretty_src_type(self))
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::surface::pretty_constraint(self))
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::surface::pretty_scheme(self))
    }
}
