use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::ParseError;
use crate::syntax::{
    AxiomError, AxiomScheme, Constraint, Scheme, SrcExpr, SrcType, TopAxioms, TypeEnv,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug)]
pub(crate) struct Item {
    pub span: Span,
    pub kind: ItemKind,
}

#[derive(Clone, Debug)]
pub(crate) enum ItemKind {
    TyCon(String, usize),
    Class(String),
    Instance(String, Vec<String>, Vec<Constraint>, Constraint),
    Prim(String, Scheme),
    Sig(String, Scheme),
    Def(String, SrcExpr),
    Check(String, SrcExpr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Def {
    pub name: String,
    pub sig: Option<Scheme>,
    pub body: SrcExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub body: SrcExpr,
}

/// A parsed and validated `.dict` program.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub tycons: Vec<(String, usize)>,
    pub classes: Vec<String>,
    pub axioms: TopAxioms,
    pub prims: Vec<(String, Scheme)>,
    pub defs: Vec<Def>,
    pub checks: Vec<Check>,
}

impl Program {
    /// Γ for the prims alone.
    pub fn prim_env(&self) -> TypeEnv {
        let mut env = TypeEnv::new();
        for (name, s) in &self.prims {
            env.push_term(name.clone(), s.clone());
        }
        env
    }

    /// Every name the program binds at top level, in any namespace.
    pub fn all_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        out.extend(self.tycons.iter().map(|(n, _)| n.clone()));
        out.extend(self.classes.iter().cloned());
        out.extend(self.axioms.names().cloned());
        out.extend(self.prims.iter().map(|(n, _)| n.clone()));
        out.extend(self.defs.iter().map(|d| d.name.clone()));
        out.extend(self.checks.iter().map(|c| c.name.clone()));
        out
    }

    pub fn def(&self, name: &str) -> Option<&Def> {
        self.defs.iter().find(|d| d.name == name)
    }
}

/// Item positions for diagnostics.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SourceMap {
    pub defs: BTreeMap<String, Span>,
    pub checks: BTreeMap<String, Span>,
    pub instances: BTreeMap<String, Span>,
}

impl SourceMap {
    pub fn def(&self, name: &str) -> Span {
        self.defs.get(name).copied().unwrap_or_default()
    }

    pub fn check(&self, name: &str) -> Span {
        self.checks.get(name).copied().unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProgramError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{}:{}: duplicate {namespace} `{name}`", span.line, span.col)]
    DuplicateName {
        namespace: &'static str,
        name: String,
        span: Span,
    },
    #[error("{}:{}: unknown class `{name}`", span.line, span.col)]
    UnknownClass { name: String, span: Span },
    #[error("{}:{}: unknown type constructor `{name}`", span.line, span.col)]
    UnknownTyCon { name: String, span: Span },
    #[error(
        "{}:{}: type constructor `{name}` expects {expected} argument(s), given {found}",
        span.line,
        span.col
    )]
    TyConArity {
        name: String,
        expected: usize,
        found: usize,
        span: Span,
    },
    #[error("{}:{}: signature for `{name}` is not followed by its definition", span.line, span.col)]
    OrphanSignature { name: String, span: Span },
    #[error("{}:{}: {error}", span.line, span.col)]
    Axiom { error: AxiomError, span: Span },
}

impl ProgramError {
    pub fn span(&self) -> Span {
        match self {
            ProgramError::Parse(e) => {
                let (line, col) = e.position();
                Span { line, col }
            }
            ProgramError::DuplicateName { span, .. }
            | ProgramError::UnknownClass { span, .. }
            | ProgramError::UnknownTyCon { span, .. }
            | ProgramError::TyConArity { span, .. }
            | ProgramError::OrphanSignature { span, .. }
            | ProgramError::Axiom { span, .. } => *span,
        }
    }
}

struct Scope<'a> {
    tycons: &'a BTreeMap<String, usize>,
    classes: &'a BTreeSet<String>,
    span: Span,
}

impl Scope<'_> {
    fn ty(&self, t: &SrcType) -> Result<(), ProgramError> {
        match t {
            SrcType::Var(_) => Ok(()),
            SrcType::Arrow(a, b) => {
                self.ty(a)?;
                self.ty(b)
            }
            SrcType::Dict(c, a) => {
                self.class(c)?;
                self.ty(a)
            }
            SrcType::Con(c, args) => {
                let expected = *self.tycons.get(c).ok_or_else(|| ProgramError::UnknownTyCon {
                    name: c.clone(),
                    span: self.span,
                })?;
                if expected != args.len() {
                    return Err(ProgramError::TyConArity {
                        name: c.clone(),
                        expected,
                        found: args.len(),
                        span: self.span,
                    });
                }
                args.iter().try_for_each(|a| self.ty(a))
            }
        }
    }

    fn class(&self, c: &str) -> Result<(), ProgramError> {
        if self.classes.contains(c) {
            Ok(())
        } else {
            Err(ProgramError::UnknownClass {
                name: c.to_string(),
                span: self.span,
            })
        }
    }

    fn constraint(&self, c: &Constraint) -> Result<(), ProgramError> {
        self.class(&c.class)?;
        self.ty(&c.arg)
    }

    fn scheme(&self, s: &Scheme) -> Result<(), ProgramError> {
        s.context().iter().try_for_each(|c| self.constraint(c))?;
        self.ty(s.body())
    }

    fn expr(&self, e: &SrcExpr) -> Result<(), ProgramError> {
        match e {
            SrcExpr::Var(_) => Ok(()),
            SrcExpr::Lam(_, b) => self.expr(b),
            SrcExpr::App(f, a) => {
                self.expr(f)?;
                self.expr(a)
            }
            SrcExpr::DictApp { fun, dict, at } => {
                self.expr(fun)?;
                self.expr(dict)?;
                self.constraint(at)
            }
            SrcExpr::Annot(e, s) => {
                self.expr(e)?;
                self.scheme(s)
            }
        }
    }
}

pub(crate) fn build_program(items: Vec<Item>) -> Result<(Program, SourceMap), ProgramError> {
    let mut tycons = BTreeMap::new();
    let mut classes = BTreeSet::new();
    let mut program = Program::default();
    let mut map = SourceMap::default();
    let dup = |namespace, name: &str, span| ProgramError::DuplicateName {
        namespace,
        name: name.to_string(),
        span,
    };

    for item in &items {
        match &item.kind {
            ItemKind::TyCon(n, k) => {
                if tycons.insert(n.clone(), *k).is_some() {
                    return Err(dup("type constructor", n, item.span));
                }
                program.tycons.push((n.clone(), *k));
            }
            ItemKind::Class(n) => {
                if !classes.insert(n.clone()) {
                    return Err(dup("class", n, item.span));
                }
                program.classes.push(n.clone());
            }
            _ => {}
        }
    }

    let mut axioms = Vec::new();
    let mut terms: BTreeSet<String> = BTreeSet::new();
    let mut pending_sig: Option<(String, Scheme, Span)> = None;
    for item in &items {
        let scope = Scope {
            tycons: &tycons,
            classes: &classes,
            span: item.span,
        };
        if let Some((name, _, span)) = &pending_sig {
            if !matches!(&item.kind, ItemKind::Def(n, _) if n == name) {
                return Err(ProgramError::OrphanSignature {
                    name: name.clone(),
                    span: *span,
                });
            }
        }
        match &item.kind {
            ItemKind::TyCon(..) | ItemKind::Class(_) => {}
            ItemKind::Instance(name, q, premises, head) => {
                premises.iter().try_for_each(|c| scope.constraint(c))?;
                scope.constraint(head)?;
                if map.instances.insert(name.clone(), item.span).is_some() {
                    return Err(dup("instance", name, item.span));
                }
                axioms.push(AxiomScheme::new(
                    name.clone(),
                    q.clone(),
                    premises.clone(),
                    head.clone(),
                ));
            }
            ItemKind::Prim(name, s) => {
                scope.scheme(s)?;
                if !terms.insert(name.clone()) {
                    return Err(dup("name", name, item.span));
                }
                program.prims.push((name.clone(), s.clone()));
            }
            ItemKind::Sig(name, s) => {
                scope.scheme(s)?;
                pending_sig = Some((name.clone(), s.clone(), item.span));
            }
            ItemKind::Def(name, body) => {
                scope.expr(body)?;
                if !terms.insert(name.clone()) {
                    return Err(dup("name", name, item.span));
                }
                let sig = pending_sig.take().map(|(_, s, sp)| {
                    map.defs.insert(name.clone(), sp);
                    s
                });
                map.defs.entry(name.clone()).or_insert(item.span);
                program.defs.push(Def {
                    name: name.clone(),
                    sig,
                    body: body.clone(),
                });
            }
            ItemKind::Check(name, body) => {
                scope.expr(body)?;
                if map.checks.insert(name.clone(), item.span).is_some() {
                    return Err(dup("check", name, item.span));
                }
                program.checks.push(Check {
                    name: name.clone(),
                    body: body.clone(),
                });
            }
        }
    }
    if let Some((name, _, span)) = pending_sig {
        return Err(ProgramError::OrphanSignature { name, span });
    }
    program.axioms = TopAxioms::new(axioms).map_err(|error| {
        let name = match &error {
            AxiomError::DuplicateName(n) => n.clone(),
            AxiomError::Unscoped { name, .. } | AxiomError::UndeterminedVariable { name, .. } => {
                name.clone()
            }
            AxiomError::Overlap { second, .. } => second.clone(),
        };
        let span = map.instances.get(&name).copied().unwrap_or_default();
        ProgramError::Axiom { error, span }
    })?;
    Ok((program, map))
}
