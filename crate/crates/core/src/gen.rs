//! Seeded random generators for types, instance sets, System F terms and
//! whole programs. Everything is driven by a caller-supplied [`Rng`], so a
//! fixed seed reproduces the same values.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::surface::{Check, Def, Program};
use crate::syntax::{
    AxiomScheme, Constraint, LabelledConstraints, Scheme, SrcExpr, SrcType, TargetEnv, TargetTerm,
    TargetType, TopAxioms,
};

/// Type constructors and their arities used by every generator.
pub const TYCONS: &[(&str, usize)] = &[("Int", 0), ("Bool", 0), ("List", 1), ("Maybe", 1), ("Pair", 2)];
pub const CLASSES: &[&str] = &["Eq", "Ord", "Show"];
pub const TYVARS: &[&str] = &["a", "b", "c"];

fn pick<'a, R: Rng, T>(rng: &mut R, xs: &'a [T]) -> &'a T {
    xs.choose(rng).expect("non-empty choice")
}

/// A monotype without arrows or dictionaries, the shape of constraint arguments.
pub fn data_type<R: Rng>(rng: &mut R, vars: &[&str], depth: usize) -> SrcType {
    if depth == 0 || rng.gen_bool(0.35) {
        if !vars.is_empty() && rng.gen_bool(0.5) {
            return SrcType::var(*pick(rng, vars));
        }
        return SrcType::base(if rng.gen() { "Int" } else { "Bool" });
    }
    let (name, arity) = *pick(rng, &TYCONS[2..]);
    let args = (0..arity).map(|_| data_type(rng, vars, depth - 1)).collect();
    SrcType::con(name, args)
}

/// Any source monotype, including arrows and dictionary types.
pub fn src_type<R: Rng>(rng: &mut R, vars: &[&str], depth: usize) -> SrcType {
    if depth > 0 {
        match rng.gen_range(0..6) {
            0 | 1 => return SrcType::arrow(src_type(rng, vars, depth - 1), src_type(rng, vars, depth - 1)),
            2 => return SrcType::dict(*pick(rng, CLASSES), data_type(rng, vars, depth - 1)),
            _ => {}
        }
    }
    data_type(rng, vars, depth)
}

pub fn constraint<R: Rng>(rng: &mut R, vars: &[&str], depth: usize) -> Constraint {
    Constraint::new(*pick(rng, CLASSES), data_type(rng, vars, depth))
}

/// A non-overlapping, terminating instance set: at most one instance per
/// class and head constructor, with premises on the head's variables only.
pub fn axioms<R: Rng>(rng: &mut R) -> TopAxioms {
    let mut out = Vec::new();
    for class in CLASSES {
        for (con, arity) in TYCONS {
            if !rng.gen_bool(0.6) {
                continue;
            }
            let vars: Vec<String> = TYVARS[..*arity].iter().map(|v| v.to_string()).collect();
            let head = Constraint::new(*class, SrcType::con(*con, vars.iter().map(SrcType::var).collect()));
            let mut premises = Vec::new();
            for v in &vars {
                for c in CLASSES {
                    if rng.gen_bool(0.3) || (c == class && rng.gen_bool(0.5)) {
                        premises.push(Constraint::new(*c, SrcType::var(v.clone())));
                    }
                }
            }
            out.push(AxiomScheme::new(format!("$f{class}{con}"), vars, premises, head));
        }
    }
    TopAxioms::new(out).expect("generated instances are well formed")
}

/// Givens `d1 : C1, …` over the type variables.
pub fn givens<R: Rng>(rng: &mut R, vars: &[&str], max: usize, prefix: &str) -> LabelledConstraints {
    let n = rng.gen_range(0..=max);
    LabelledConstraints::from_entries(
        (0..n)
            .map(|i| (format!("{prefix}{}", i + 1), constraint(rng, vars, 2)))
            .collect(),
    )
}

// ---- well-typed System F terms ----

/// A System F type built from `Int`, `Bool`, arrows and rank-1 `forall`.
pub fn target_type<R: Rng>(rng: &mut R, tyvars: &[String], depth: usize) -> TargetType {
    if depth == 0 || rng.gen_bool(0.4) {
        if !tyvars.is_empty() && rng.gen_bool(0.3) {
            return TargetType::var(pick(rng, tyvars).clone());
        }
        return TargetType::base(if rng.gen() { "Int" } else { "Bool" });
    }
    TargetType::arrow(target_type(rng, tyvars, depth - 1), target_type(rng, tyvars, depth - 1))
}

/// The constants every generated term may refer to.
pub fn term_env() -> TargetEnv {
    let a = || TargetType::var("a");
    let b = || TargetType::var("b");
    let int = || TargetType::base("Int");
    let bool_ = || TargetType::base("Bool");
    TargetEnv::new()
        .with_term("zero", int())
        .with_term("true", bool_())
        .with_term("isZero", TargetType::arrow(int(), bool_()))
        .with_term("id", TargetType::forall("a", TargetType::arrow(a(), a())))
        .with_term(
            "const",
            TargetType::foralls(["a".into(), "b".into()], TargetType::arrows([a(), b()], a())),
        )
        .with_term(
            "choose",
            TargetType::forall("a", TargetType::arrows([bool_(), a(), a()], a())),
        )
}

struct TermGen<'r, R> {
    rng: &'r mut R,
    vars: Vec<(String, TargetType)>,
    counter: usize,
}

impl<R: Rng> TermGen<'_, R> {
    fn fresh(&mut self, base: &str) -> String {
        self.counter += 1;
        format!("{base}{}", self.counter)
    }

    fn closed_base(&mut self, ty: &TargetType) -> Option<TargetTerm> {
        match ty {
            TargetType::Con(n, _) if n == "Int" => Some(TargetTerm::var("zero")),
            TargetType::Con(n, _) if n == "Bool" => Some(TargetTerm::var("true")),
            _ => None,
        }
    }

    /// A term of type `ty` in the current scope.
    fn term(&mut self, ty: &TargetType, depth: usize) -> TargetTerm {
        let in_scope: Vec<String> = self
            .vars
            .iter()
            .rev()
            .filter(|(_, t)| t.alpha_eq(ty))
            .map(|(x, _)| x.clone())
            .collect();
        if depth == 0 {
            if let Some(x) = in_scope.first() {
                return TargetTerm::var(x.clone());
            }
        }
        match ty {
            TargetType::Arrow(dom, cod) if depth == 0 || self.rng.gen_bool(0.6) => {
                let x = self.fresh("x");
                self.vars.push((x.clone(), (**dom).clone()));
                let body = self.term(cod, depth.saturating_sub(1));
                self.vars.pop();
                return TargetTerm::lam(x, (**dom).clone(), body);
            }
            TargetType::Forall(a, body) => {
                let b = self.fresh("t");
                let inner = self.term(&body.subst1(a, &TargetType::var(b.clone())), depth.saturating_sub(1));
                return TargetTerm::ty_lam(b, inner);
            }
            _ => {}
        }
        if depth == 0 {
            if let Some(t) = self.closed_base(ty) {
                return t;
            }
            // Argument types only mention inhabited variables, so a variable
            // of the right type is always in scope here.
            return TargetTerm::var(in_scope.first().expect("inhabited type variable").clone());
        }
        let d = depth - 1;
        match self.rng.gen_range(0..8) {
            0 if !in_scope.is_empty() => TargetTerm::var(pick(self.rng, &in_scope).clone()),
            1 => {
                // β-redex
                let sigma = self.arg_type();
                let x = self.fresh("x");
                self.vars.push((x.clone(), sigma.clone()));
                let body = self.term(ty, d);
                self.vars.pop();
                let arg = self.term(&sigma, d);
                TargetTerm::app(TargetTerm::lam(x, sigma, body), arg)
            }
            2 => {
                // type-level redex `(Λb. t) [σ]` with `b` unused in the result type
                let b = self.fresh("t");
                let body = self.term(ty, d);
                let sigma = self.arg_type();
                TargetTerm::ty_app(TargetTerm::ty_lam(b, body), sigma)
            }
            3 => TargetTerm::app(TargetTerm::ty_app(TargetTerm::var("id"), ty.clone()), self.term(ty, d)),
            4 => {
                let sigma = self.arg_type();
                let other = self.term(&sigma, d);
                TargetTerm::apps(
                    TargetTerm::ty_apps(TargetTerm::var("const"), [ty.clone(), sigma]),
                    [self.term(ty, d), other],
                )
            }
            5 => self.via_choose(ty, d),
            6 => {
                // apply a function from the scope whose result has the right type
                let fs: Vec<(String, TargetType)> = self
                    .vars
                    .iter()
                    .filter(|(_, t)| matches!(t, TargetType::Arrow(_, c) if c.alpha_eq(ty)))
                    .cloned()
                    .collect();
                match fs.choose(self.rng) {
                    Some((f, TargetType::Arrow(dom, _))) => {
                        let dom = (**dom).clone();
                        TargetTerm::app(TargetTerm::var(f.clone()), self.term(&dom, d))
                    }
                    _ => self.term(ty, d),
                }
            }
            _ => match ty {
                TargetType::Con(n, _) if n == "Bool" => {
                    TargetTerm::app(TargetTerm::var("isZero"), self.term(&TargetType::base("Int"), d))
                }
                _ => self.term(ty, d),
            },
        }
    }

    fn via_choose(&mut self, ty: &TargetType, depth: usize) -> TargetTerm {
        TargetTerm::apps(
            TargetTerm::ty_app(TargetTerm::var("choose"), ty.clone()),
            [
                self.term(&TargetType::base("Bool"), depth),
                self.term(ty, depth),
                self.term(ty, depth),
            ],
        )
    }

    /// Type variables that some variable in scope inhabits.
    fn inhabited(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .vars
            .iter()
            .filter_map(|(_, t)| match t {
                TargetType::Var(a) => Some(a.clone()),
                _ => None,
            })
            .collect();
        out.dedup();
        out
    }

    fn arg_type(&mut self) -> TargetType {
        let tyvars = self.inhabited();
        target_type(self.rng, &tyvars, 2)
    }
}

/// A closed, well-typed term of a random type over [`term_env`], with its type.
pub fn typed_term<R: Rng>(rng: &mut R, depth: usize) -> (TargetTerm, TargetType) {
    let ty = target_type(rng, &[], 3);
    let ty = if rng.gen_bool(0.3) {
        TargetType::forall("a", TargetType::arrow(TargetType::var("a"), ty))
    } else {
        ty
    };
    let mut g = TermGen {
        rng,
        vars: Vec::new(),
        counter: 0,
    };
    let t = g.term(&ty, depth);
    (t, ty)
}

// ---- untyped-by-construction syntax for round trips ----

const TERM_VARS: &[&str] = &["x", "y", "f", "g", "k"];

/// An arbitrary (not necessarily well-typed) System F term.
pub fn target_term<R: Rng>(rng: &mut R, depth: usize) -> TargetTerm {
    let tyvars: Vec<String> = TYVARS.iter().map(|s| s.to_string()).collect();
    if depth == 0 {
        return TargetTerm::var(*pick(rng, TERM_VARS));
    }
    let d = depth - 1;
    match rng.gen_range(0..6) {
        0 => TargetTerm::var(*pick(rng, TERM_VARS)),
        1 => TargetTerm::lam(*pick(rng, TERM_VARS), any_target_type(rng, &tyvars, 2), target_term(rng, d)),
        2 | 3 => TargetTerm::app(target_term(rng, d), target_term(rng, d)),
        4 => TargetTerm::ty_lam(pick(rng, &tyvars).clone(), target_term(rng, d)),
        _ => TargetTerm::ty_app(target_term(rng, d), any_target_type(rng, &tyvars, 2)),
    }
}

/// Any target type, including `forall`, dictionaries and constructors.
pub fn any_target_type<R: Rng>(rng: &mut R, tyvars: &[String], depth: usize) -> TargetType {
    if depth == 0 {
        return match rng.gen_range(0..3) {
            0 => TargetType::var(pick(rng, tyvars).clone()),
            1 => TargetType::base("Int"),
            _ => TargetType::base("Bool"),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..5) {
        0 => TargetType::arrow(any_target_type(rng, tyvars, d), any_target_type(rng, tyvars, d)),
        1 => TargetType::forall(pick(rng, tyvars).clone(), any_target_type(rng, tyvars, d)),
        2 => TargetType::dict(*pick(rng, CLASSES), any_target_type(rng, tyvars, d)),
        3 => {
            let (name, arity) = *pick(rng, TYCONS);
            TargetType::con(name, (0..arity).map(|_| any_target_type(rng, tyvars, d)).collect())
        }
        _ => any_target_type(rng, tyvars, 0),
    }
}

/// A scheme quantifying exactly its free variables, in a random order.
pub fn scheme<R: Rng>(rng: &mut R) -> Scheme {
    let n = rng.gen_range(0..3);
    let context: Vec<Constraint> = (0..n).map(|_| constraint(rng, TYVARS, 1)).collect();
    let body = src_type(rng, TYVARS, 3);
    let mut order = Vec::new();
    for c in &context {
        c.arg.ftv_ordered(&mut order);
    }
    body.ftv_ordered(&mut order);
    order.shuffle(rng);
    Scheme::new(order, context, body)
}

/// A source expression over `names`; dictionary applications are never chained.
pub fn src_expr<R: Rng>(rng: &mut R, names: &[String], depth: usize) -> SrcExpr {
    if depth == 0 {
        return SrcExpr::var(pick(rng, names).clone());
    }
    let d = depth - 1;
    match rng.gen_range(0..7) {
        0 => SrcExpr::var(pick(rng, names).clone()),
        1 | 2 => {
            let x = *pick(rng, TERM_VARS);
            let mut inner = names.to_vec();
            inner.push(x.to_string());
            SrcExpr::lam(x, src_expr(rng, &inner, d))
        }
        3 | 4 => SrcExpr::app(src_expr(rng, names, d), src_expr(rng, names, d)),
        5 => {
            let fun = match src_expr(rng, names, d) {
                e @ SrcExpr::DictApp { .. } => SrcExpr::annot(e, scheme(rng)),
                e => e,
            };
            SrcExpr::dict_app(fun, src_expr(rng, names, d), constraint(rng, TYVARS, 1))
        }
        _ => SrcExpr::annot(src_expr(rng, names, d), scheme(rng)),
    }
}

/// A syntactically valid program: declared constructors and classes, a
/// random instance set, prims, defs (some with signatures) and checks.
/// The program need not typecheck.
pub fn program<R: Rng>(rng: &mut R) -> Program {
    let mut names: Vec<String> = Vec::new();
    let prims: Vec<(String, Scheme)> = (0..rng.gen_range(1..4))
        .map(|i| {
            let n = format!("p{i}");
            names.push(n.clone());
            (n, scheme(rng))
        })
        .collect();
    let mut defs = Vec::new();
    for i in 0..rng.gen_range(0..4) {
        let sig = rng.gen_bool(0.5).then(|| scheme(rng));
        let body = src_expr(rng, &names, 3);
        let name = format!("d{i}");
        names.push(name.clone());
        defs.push(Def { name, sig, body });
    }
    let checks = (0..rng.gen_range(0..3))
        .map(|i| Check {
            name: format!("c{i}"),
            body: src_expr(rng, &names, 3),
        })
        .collect();
    Program {
        tycons: TYCONS.iter().map(|(n, k)| (n.to_string(), *k)).collect(),
        classes: CLASSES.iter().map(|c| c.to_string()).collect(),
        axioms: axioms(rng),
        prims,
        defs,
        checks,
    }
}
