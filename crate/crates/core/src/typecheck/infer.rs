use std::collections::{BTreeMap, BTreeSet};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use super::ambiguity::is_context_unambiguous;
use super::safety::{dictapp_safety, SafetyReport, Verdict};
use super::{ChoiceSite, CheckOptions, Elaborated, Strategy, TypeError};
use crate::elaborate::{elab_constraint, elab_mono, elab_subst};
use crate::entailment::{alternatives, simplify_with_depth, solve_with_depth, SolveError, Step};
use crate::syntax::{
    is_meta, pretty_tyvar_names, unify_with, Constraint, EvSubst, LabelledConstraints, NameSupply,
    Scheme, SrcExpr, SrcType, TargetTerm, TargetType, TopAxioms, TySubst, TypeEnv, UnifyFailure,
};

/// Closed stand-in for type variables that occur in an elaborated term but
/// in neither its type nor its context.
pub fn unconstrained_type() -> TargetType {
    TargetType::forall("z", TargetType::var("z"))
}

#[derive(Clone)]
pub(crate) struct Infer<'a> {
    axioms: &'a TopAxioms,
    opts: &'a CheckOptions,
    strategy: &'a Strategy,
    supply: NameSupply,
    theta: TySubst,
    wanteds: Vec<(String, Constraint)>,
    introduced: Vec<(String, Constraint)>,
    givens: Vec<(String, Constraint)>,
    sites: Vec<ChoiceSite>,
    safety: Vec<SafetyReport>,
    steps: Vec<(Constraint, Vec<Step>)>,
}

impl From<SolveError> for TypeError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Unsolvable(c) => TypeError::Unsolvable(c),
            SolveError::DepthExceeded { constraint, limit } => {
                TypeError::DepthExceeded { constraint, limit }
            }
        }
    }
}

/// Rename unification variables to readable names for messages.
fn tidy_types(tys: &[SrcType]) -> Vec<SrcType> {
    let mut order = Vec::new();
    let mut avoid = BTreeSet::new();
    for t in tys {
        t.ftv_ordered(&mut order);
        avoid.extend(t.ftv());
    }
    let metas: Vec<String> = order.into_iter().filter(|v| is_meta(v)).collect();
    let theta = TySubst::from_pairs(
        metas
            .into_iter()
            .zip(pretty_tyvar_names(&avoid))
            .map(|(m, n)| (m, SrcType::Var(n))),
    );
    tys.iter().map(|t| t.apply(&theta)).collect()
}

fn tidy_constraint(c: &Constraint) -> Constraint {
    Constraint::new(c.class.clone(), tidy_types(std::slice::from_ref(&c.arg)).remove(0))
}

/// Every term binder in `e`.
pub(crate) fn expr_names(e: &SrcExpr, out: &mut BTreeSet<String>) {
    match e {
        SrcExpr::Var(_) => {}
        SrcExpr::Lam(x, b) => {
            out.insert(x.clone());
            expr_names(b, out);
        }
        SrcExpr::App(f, a) => {
            expr_names(f, out);
            expr_names(a, out);
        }
        SrcExpr::DictApp { fun, dict, .. } => {
            expr_names(fun, out);
            expr_names(dict, out);
        }
        SrcExpr::Annot(e, _) => expr_names(e, out),
    }
}

impl<'a> Infer<'a> {
    pub(crate) fn new(
        axioms: &'a TopAxioms,
        opts: &'a CheckOptions,
        strategy: &'a Strategy,
        reserved: BTreeSet<String>,
    ) -> Self {
        Infer {
            axioms,
            opts,
            strategy,
            supply: NameSupply::avoiding(reserved),
            theta: TySubst::new(),
            wanteds: Vec::new(),
            introduced: Vec::new(),
            givens: Vec::new(),
            sites: Vec::new(),
            safety: Vec::new(),
            steps: Vec::new(),
        }
    }

    fn givens_lc(&self) -> LabelledConstraints {
        LabelledConstraints::from_entries(self.givens.clone())
    }

    fn unify(&mut self, expected: &SrcType, found: &SrcType) -> Result<(), TypeError> {
        unify_with(expected, found, &is_meta, &mut self.theta).map_err(|e| match e {
            UnifyFailure::Mismatch(..) => {
                let t = tidy_types(&[expected.apply(&self.theta), found.apply(&self.theta)]);
                TypeError::Mismatch {
                    expected: t[0].clone(),
                    found: t[1].clone(),
                }
            }
            UnifyFailure::Occurs(v, ty) => {
                let t = tidy_types(&[SrcType::Var(v), ty]);
                TypeError::Occurs {
                    var: t[0].clone(),
                    ty: t[1].clone(),
                }
            }
        })
    }

    /// `x [τ̄] d̄` with a fresh wanted per constraint, or the eager form
    /// `(λ(d:υ). x [τ̄] d) ev` for constraints the strategy discharges on the spot.
    fn instantiate(&mut self, head: TargetTerm, s: &Scheme) -> Result<(SrcType, TargetTerm), TypeError> {
        let mut inst = TySubst::new();
        let mut tys = Vec::new();
        for q in &s.quantified {
            let m = self.supply.fresh_meta();
            tys.push(elab_mono(&m));
            inst.insert(q.clone(), m);
        }
        let mut term = TargetTerm::ty_apps(head, tys);
        let mut eager = Vec::new();
        for c in s.context() {
            let c = c.apply(&inst);
            let d = self.supply.fresh("d");
            term = TargetTerm::app(term, TargetTerm::var(d.clone()));
            self.introduced.push((d.clone(), c.clone()));
            if let Some(finals) = &self.strategy.eager {
                if let Some(fc) = finals.get(&d) {
                    let r = solve_with_depth(self.axioms, &self.givens_lc(), fc, self.opts.bounds.solve_depth);
                    if let Ok(r) = r {
                        eager.push((d, fc.clone(), r.evidence));
                        continue;
                    }
                }
            }
            self.wanteds.push((d, c));
        }
        for (d, fc, ev) in eager.into_iter().rev() {
            term = TargetTerm::app(TargetTerm::lam(d, elab_constraint(&fc), term), ev);
        }
        Ok((s.body().apply(&inst), term))
    }

    pub(crate) fn infer(&mut self, env: &mut TypeEnv, e: &SrcExpr) -> Result<(SrcType, TargetTerm), TypeError> {
        match e {
            SrcExpr::Var(x) => {
                let s = env
                    .lookup(x)
                    .cloned()
                    .ok_or_else(|| TypeError::UnboundVar(x.clone()))?;
                self.instantiate(TargetTerm::var(x.clone()), &s)
            }
            SrcExpr::Lam(x, body) => {
                let a = self.supply.fresh_meta();
                env.push_term(x.clone(), Scheme::mono(a.clone()));
                let r = self.infer(env, body);
                env.pop();
                let (ty, t) = r?;
                Ok((
                    SrcType::arrow(a.clone(), ty),
                    TargetTerm::lam(x.clone(), elab_mono(&a), t),
                ))
            }
            SrcExpr::App(f, a) => {
                let (fty, ft) = self.infer(env, f)?;
                let (aty, at) = self.infer(env, a)?;
                let r = self.supply.fresh_meta();
                self.unify(&fty, &SrcType::arrow(aty, r.clone()))?;
                Ok((r, TargetTerm::app(ft, at)))
            }
            SrcExpr::Annot(inner, s) => {
                let (sk, t) = self.check_annotation(env, inner, s)?;
                self.instantiate(t, &sk)
            }
            SrcExpr::DictApp { fun, dict, at } => self.dict_app(env, fun, dict, at),
        }
    }

    fn dict_app(
        &mut self,
        env: &mut TypeEnv,
        fun: &SrcExpr,
        dict: &SrcExpr,
        at: &Constraint,
    ) -> Result<(SrcType, TargetTerm), TypeError> {
        // The specified type of `fun`, under its written names and under the
        // names its elaboration actually binds.
        let (written, spec, t1) = match fun {
            SrcExpr::DictApp { .. } => return Err(TypeError::ChainedDictApp),
            SrcExpr::Var(x) => {
                let s = env
                    .lookup(x)
                    .cloned()
                    .ok_or_else(|| TypeError::UnboundVar(x.clone()))?;
                if !is_context_unambiguous(&s, &env.apply(&self.theta)) {
                    return Err(TypeError::AmbiguousType(s));
                }
                (s.clone(), s, TargetTerm::var(x.clone()))
            }
            SrcExpr::Annot(e, s) => {
                self.check_principal(env, e)?;
                let (sk, t) = self.check_annotation(env, e, s)?;
                (s.clone(), sk, t)
            }
            _ => return Err(TypeError::UnspecifiedDictApp),
        };
        let k = written
            .context()
            .iter()
            .position(|c| c == at)
            .ok_or_else(|| TypeError::NoSuchConstraint {
                at: at.clone(),
                scheme: written.clone(),
            })?;
        let a_pos = match at.arg.as_var() {
            Some(v) => Some(
                written
                    .quantified
                    .iter()
                    .position(|q| q == v)
                    .ok_or_else(|| TypeError::NotQuantified {
                        var: v.to_string(),
                        scheme: written.clone(),
                    })?,
            ),
            None if at.arg.ftv().is_empty() => None,
            None => return Err(TypeError::BadDictAppConstraint(at.clone())),
        };

        let fresh: Vec<String> = spec
            .quantified
            .iter()
            .map(|q| self.supply.fresh_like(q))
            .collect();
        let ren = TySubst::from_pairs(
            spec.quantified
                .iter()
                .cloned()
                .zip(fresh.iter().map(|n| SrcType::var(n.clone()))),
        );
        let ctx: Vec<Constraint> = spec.context().iter().map(|c| c.apply(&ren)).collect();
        let body = spec.body().apply(&ren);
        let (c1, c2) = (&ctx[..k], &ctx[k + 1..]);
        let at_r = ctx[k].clone();

        if self.opts.guard {
            let report = dictapp_safety(self.axioms, &self.givens_lc(), c1, c2, &at_r, &self.opts.bounds);
            match report.verdict {
                Verdict::Safe => self.safety.push(report),
                Verdict::Unsafe => return Err(TypeError::Unsafe(Box::new(report))),
                Verdict::Inconclusive => return Err(TypeError::SafetyInconclusive(Box::new(report))),
            }
        }

        let (dty, t2) = self.infer(env, dict)?;
        let tau2 = match a_pos {
            Some(_) => self.supply.fresh_meta(),
            None => at_r.arg.clone(),
        };
        self.unify(&SrcType::dict(at_r.class.clone(), tau2.clone()), &dty)?;

        let inst_a = match a_pos {
            Some(i) => TySubst::singleton(fresh[i].clone(), tau2.clone()),
            None => TySubst::new(),
        };
        let binders: Vec<String> = fresh
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != a_pos)
            .map(|(_, n)| n.clone())
            .collect();
        let c1i: Vec<Constraint> = c1.iter().map(|c| c.apply(&inst_a)).collect();
        let c2i: Vec<Constraint> = c2.iter().map(|c| c.apply(&inst_a)).collect();
        let labels: Vec<String> = c1i.iter().map(|_| self.supply.fresh("d")).collect();

        let ty_args = fresh.iter().enumerate().map(|(i, n)| {
            if Some(i) == a_pos {
                elab_mono(&tau2)
            } else {
                TargetType::var(n.clone())
            }
        });
        let inner = TargetTerm::apps(
            TargetTerm::ty_apps(t1, ty_args.collect::<Vec<_>>()),
            labels.iter().map(|d| TargetTerm::var(d.clone())),
        );
        let inner = TargetTerm::app(inner, t2);
        let term = TargetTerm::ty_lams(
            binders.clone(),
            TargetTerm::lams(
                labels.iter().cloned().zip(c1i.iter().map(elab_constraint)),
                inner,
            ),
        );
        let result = Scheme::new(
            binders,
            c1i.into_iter().chain(c2i).collect(),
            body.apply(&inst_a),
        );
        self.instantiate(term, &result)
    }

    /// Reject an annotated expression whose principal type is ambiguous.
    fn check_principal(&self, env: &mut TypeEnv, e: &SrcExpr) -> Result<(), TypeError> {
        let mut trial = self.clone();
        let start = trial.wanteds.len();
        let (ty, _) = trial.infer(env, e)?;
        let ws = LabelledConstraints::from_entries(
            trial.wanteds[start..]
                .iter()
                .map(|(d, c)| (d.clone(), c.apply(&trial.theta)))
                .collect(),
        );
        let (residual, _) = simplify_with_depth(trial.axioms, &ws, &mut trial.supply, trial.opts.bounds.solve_depth)?;
        let ty = ty.apply(&trial.theta);
        let env_ftv = env.apply(&trial.theta).ftv();
        let body_ftv = ty.ftv();
        let ambiguous = residual
            .constraints()
            .flat_map(|c| c.ftv())
            .any(|v| is_meta(&v) && !body_ftv.contains(&v) && !env_ftv.contains(&v));
        if ambiguous {
            let (scheme, _, _) = generalize(&ty, &residual, &BTreeSet::new(), None);
            return Err(TypeError::AmbiguousType(scheme));
        }
        Ok(())
    }

    /// Check `e` against `s` with its quantifiers rigid and its context as
    /// givens. Returns the scheme as bound in the term, and the term.
    fn check_annotation(
        &mut self,
        env: &mut TypeEnv,
        e: &SrcExpr,
        s: &Scheme,
    ) -> Result<(Scheme, TargetTerm), TypeError> {
        let sk: Vec<String> = s.quantified.iter().map(|q| self.supply.fresh_like(q)).collect();
        let ren = TySubst::from_pairs(
            s.quantified
                .iter()
                .cloned()
                .zip(sk.iter().map(|n| SrcType::var(n.clone()))),
        );
        let ctx: Vec<Constraint> = s.context().iter().map(|c| c.apply(&ren)).collect();
        let body = s.body().apply(&ren);
        let glen = self.givens.len();
        let labels: Vec<String> = ctx
            .iter()
            .map(|c| {
                let d = self.supply.fresh("d");
                self.givens.push((d.clone(), c.clone()));
                d
            })
            .collect();
        let start = self.wanteds.len();
        let (ty, t) = self.infer(env, e)?;
        self.unify(&body, &ty)?;
        let skolems: BTreeSet<String> = sk.iter().cloned().collect();
        let env_ftv = env.apply(&self.theta).ftv();
        if let Some(v) = skolems.iter().find(|v| env_ftv.contains(*v)) {
            return Err(TypeError::SkolemEscape(v.clone()));
        }
        let inner = self.wanteds.split_off(start);
        let mut eta = EvSubst::new();
        for (d, c) in inner {
            let c = c.apply(&self.theta);
            let ftv = c.ftv();
            let local = ftv.iter().any(|v| skolems.contains(v)) || !ftv.iter().any(|v| is_meta(v));
            if local {
                let ev = self.discharge(&d, &c)?;
                eta.insert(d, ev);
            } else {
                self.wanteds.push((d, c));
            }
        }
        self.givens.truncate(glen);
        let term = TargetTerm::ty_lams(
            sk.clone(),
            TargetTerm::lams(
                labels.into_iter().zip(ctx.iter().map(elab_constraint)),
                eta.apply(&t),
            ),
        );
        Ok((Scheme::new(sk, ctx, body), term))
    }

    /// Evidence for a wanted under the givens in scope: the canonical choice
    /// unless the strategy picks another alternative at this label.
    fn discharge(&mut self, d: &str, c: &Constraint) -> Result<TargetTerm, TypeError> {
        if c.ftv().iter().any(|v| is_meta(v)) {
            return Err(TypeError::AmbiguousConstraint(tidy_constraint(c)));
        }
        let givens = self.givens_lc();
        let r = solve_with_depth(self.axioms, &givens, c, self.opts.bounds.solve_depth)?;
        let mut ev = r.evidence;
        let alts = alternatives(self.axioms, &givens, c);
        if alts.len() > 1 {
            if let Some(alt) = self.strategy.choices.get(d).and_then(|&k| alts.get(k)) {
                ev = alt.clone();
            }
            self.sites.push(ChoiceSite {
                label: d.to_string(),
                constraint: c.clone(),
                alternatives: alts,
            });
        }
        self.steps.push((c.clone(), r.steps));
        Ok(ev)
    }

    /// Apply the final substitution to the types in `t` and close over
    /// any unification variable left in it.
    fn zonk(&self, t: &TargetTerm) -> TargetTerm {
        let t = t.replace_type_vars(&elab_subst(&self.theta));
        let leftover: BTreeMap<String, TargetType> = t
            .free_tyvars()
            .into_iter()
            .filter(|v| is_meta(v))
            .map(|v| (v, unconstrained_type()))
            .collect();
        if leftover.is_empty() {
            t
        } else {
            t.replace_type_vars(&leftover)
        }
    }

    fn finish(self, scheme: Scheme, term: TargetTerm) -> Elaborated {
        let wanteds = self
            .introduced
            .iter()
            .map(|(d, c)| (d.clone(), c.apply(&self.theta)))
            .collect();
        Elaborated {
            scheme,
            term,
            sites: self.sites,
            wanteds,
            safety: self.safety,
            steps: self.steps,
        }
    }

    /// Elaborate against a signature: rigid quantifiers, context as givens.
    pub(crate) fn run_sig(mut self, env: &TypeEnv, body: &SrcExpr, sig: &Scheme) -> Result<Elaborated, TypeError> {
        for q in &sig.quantified {
            self.supply.reserve(q.clone());
        }
        let labels: Vec<String> = sig
            .context()
            .iter()
            .map(|c| {
                let d = self.supply.fresh("d");
                self.givens.push((d.clone(), c.clone()));
                d
            })
            .collect();
        let mut env = env.clone();
        let (ty, t) = self.infer(&mut env, body)?;
        self.unify(sig.body(), &ty)?;
        let mut eta = EvSubst::new();
        for (d, c) in std::mem::take(&mut self.wanteds) {
            let c = c.apply(&self.theta);
            let ev = self.discharge(&d, &c)?;
            eta.insert(d, ev);
        }
        let inner = self.zonk(&TargetTerm::lams(
            labels.into_iter().zip(sig.context().iter().map(elab_constraint)),
            eta.apply(&t),
        ));
        let term = TargetTerm::ty_lams(sig.quantified.clone(), inner);
        Ok(self.finish(sig.clone(), term))
    }

    /// Elaborate without a signature: simplify the wanteds and generalise.
    pub(crate) fn run_top(mut self, env: &TypeEnv, body: &SrcExpr) -> Result<Elaborated, TypeError> {
        let mut env = env.clone();
        let (ty, t) = self.infer(&mut env, body)?;
        let ws = LabelledConstraints::from_entries(
            std::mem::take(&mut self.wanteds)
                .into_iter()
                .map(|(d, c)| (d, c.apply(&self.theta)))
                .collect(),
        );
        let (residual, eta) = simplify_with_depth(self.axioms, &ws, &mut self.supply, self.opts.bounds.solve_depth)?;
        if let Some(c) = residual.constraints().find(|c| !c.is_var_headed()) {
            return Err(TypeError::Unsolvable(tidy_constraint(c)));
        }
        let ty = ty.apply(&self.theta);
        let inner = eta.apply(&t).replace_type_vars(&elab_subst(&self.theta));
        let avoid: BTreeSet<String> = inner.free_tyvars().into_iter().filter(|v| !is_meta(v)).collect();
        let (scheme, renaming, perm) = generalize(&ty, &residual, &avoid, self.strategy.permute);
        let labels = perm.iter().map(|&i| residual.entries()[i].0.clone());
        // Capture-avoiding: binders inside `inner` may reuse the new names.
        let inner = TargetTerm::lams(
            labels.zip(scheme.context().iter().map(elab_constraint)),
            inner.subst_types(&elab_subst(&renaming)),
        );
        let term = TargetTerm::ty_lams(scheme.quantified.clone(), self.zonk(&inner));
        Ok(self.finish(scheme, term))
    }

    pub(crate) fn run_infer(mut self, env: &TypeEnv, body: &SrcExpr) -> Result<super::Derivation, TypeError> {
        let mut env = env.clone();
        let (ty, t) = self.infer(&mut env, body)?;
        Ok(super::Derivation {
            residual: LabelledConstraints::from_entries(
                self.wanteds
                    .iter()
                    .map(|(d, c)| (d.clone(), c.apply(&self.theta)))
                    .collect(),
            ),
            ty: ty.apply(&self.theta),
            term: t.replace_type_vars(&elab_subst(&self.theta)),
        })
    }
}

/// `∀ā. C̄ ⇒ τ` with `ā` the variables of `τ` then of `C̄` in first-occurrence
/// order, renamed to `a, b, ...` avoiding `avoid`. With a seed, the
/// quantifiers and the context are shuffled.
pub(crate) fn generalize(
    ty: &SrcType,
    residual: &LabelledConstraints,
    avoid: &BTreeSet<String>,
    permute: Option<u64>,
) -> (Scheme, TySubst, Vec<usize>) {
    let mut order = Vec::new();
    ty.ftv_ordered(&mut order);
    for c in residual.constraints() {
        c.arg.ftv_ordered(&mut order);
    }
    let mut perm: Vec<usize> = (0..residual.len()).collect();
    if let Some(seed) = permute {
        let mut rng = StdRng::seed_from_u64(seed);
        order.shuffle(&mut rng);
        perm.shuffle(&mut rng);
    }
    let mut taken = avoid.clone();
    taken.extend(order.iter().filter(|v| !is_meta(v)).cloned());
    let mut names = pretty_tyvar_names(&taken);
    let mut renaming = TySubst::new();
    let mut quantified = Vec::new();
    for v in order {
        if is_meta(&v) {
            let n = names.next().expect("unbounded");
            renaming.insert(v, SrcType::var(n.clone()));
            quantified.push(n);
        } else {
            quantified.push(v);
        }
    }
    let context = perm
        .iter()
        .map(|&i| residual.entries()[i].1.apply(&renaming))
        .collect();
    (Scheme::new(quantified, context, ty.apply(&renaming)), renaming, perm)
}
