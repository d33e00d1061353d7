//! Coherence checking: elaborate a program in several admissible ways and
//! compare the normal forms of every `check` item.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::surface::Program;
use crate::elaborate::{elab_constraint, elab_mono};
use crate::syntax::{match_type, Scheme, SrcExpr, TargetEnv, TargetTerm, TargetType, TySubst};
use crate::systemf::{erase, inline_defs, normalize, FuelExhausted, Untyped, DEFAULT_FUEL};
use crate::typecheck::{
    check_program_with, is_unambiguous, program_target_env, to_sysf, unconstrained_type, CheckOptions,
    CheckedProgram, ItemError, Strategy,
};

pub const DEFAULT_LIMIT: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoherenceOptions {
    pub check: CheckOptions,
    /// Maximum number of derivations compared per item.
    pub limit: usize,
    pub seed: u64,
    pub fuel: usize,
}

impl Default for CoherenceOptions {
    fn default() -> Self {
        CoherenceOptions {
            check: CheckOptions::default(),
            limit: DEFAULT_LIMIT,
            seed: 0,
            fuel: DEFAULT_FUEL,
        }
    }
}

/// How a derivation departs from the canonical one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Variant {
    Canonical,
    EagerInstantiate,
    PermuteQuantifiers(u64),
    /// Non-canonical evidence at `(item, label)` sites.
    LocalVsGlobal(BTreeMap<(String, String), usize>),
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Canonical => write!(f, "canonical"),
            Variant::EagerInstantiate => write!(f, "eager"),
            Variant::PermuteQuantifiers(seed) => write!(f, "permute({seed})"),
            Variant::LocalVsGlobal(choices) => {
                write!(f, "choose(")?;
                for (i, ((item, label), k)) in choices.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{item}.{label}={k}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Coherent,
    Incoherent {
        first: Variant,
        second: Variant,
        first_nf: Untyped,
        second_nf: Untyped,
    },
    /// Too expensive to decide: normalisation ran out of fuel.
    Inconclusive(String),
    Skipped(SkipReason),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SkipReason {
    Ambiguous(Scheme),
    /// The program was rejected; carries the message.
    Rejected(ItemError),
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SkipReason::Ambiguous(s) => write!(f, "ambiguous type {s}"),
            SkipReason::Rejected(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoherenceReport {
    pub item: String,
    pub outcome: Outcome,
    pub compared: usize,
    /// More derivations existed than the limit allowed.
    pub truncated: bool,
}

/// One complete elaboration of the program.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub variant: Variant,
    pub program: CheckedProgram,
}

/// Defs reachable from `root` through free variables.
fn dependencies(p: &Program, root: &SrcExpr) -> BTreeSet<String> {
    let mut seen = BTreeSet::new();
    let mut todo: Vec<String> = root.free_vars().into_iter().collect();
    while let Some(x) = todo.pop() {
        if let Some(d) = p.def(&x) {
            if seen.insert(x) {
                todo.extend(d.body.free_vars());
            }
        }
    }
    seen
}

fn item_body<'a>(p: &'a Program, item: &str) -> Option<&'a SrcExpr> {
    p.checks
        .iter()
        .find(|c| c.name == item)
        .map(|c| &c.body)
        .or_else(|| p.def(item).map(|d| &d.body))
}

/// Derivations of the whole program relevant to `item`, canonical first,
/// at most `opts.limit` of them. The flag reports whether more existed.
pub fn enumerate_derivations(
    p: &Program,
    item: &str,
    opts: &CoherenceOptions,
) -> Result<(Vec<Derivation>, bool), ItemError> {
    let run = |strategy: &dyn Fn(&str) -> Strategy| check_program_with(p, &opts.check, strategy);
    let canonical = run(&|_| Strategy::default())?;
    let mut relevant = item_body(p, item).map(|b| dependencies(p, b)).unwrap_or_default();
    relevant.insert(item.to_string());

    let mut out = vec![Derivation {
        variant: Variant::Canonical,
        program: canonical.clone(),
    }];
    let mut pending: VecDeque<Variant> = VecDeque::new();
    pending.push_back(Variant::EagerInstantiate);
    pending.push_back(Variant::PermuteQuantifiers(opts.seed));
    pending.push_back(Variant::PermuteQuantifiers(opts.seed.wrapping_add(1)));

    // Choice sites, then assignments in order of how many sites deviate.
    let mut sites: Vec<((String, String), usize)> = canonical
        .items
        .iter()
        .filter(|i| !opts.check.guard && relevant.contains(&i.name))
        .flat_map(|i| {
            i.elab
                .sites
                .iter()
                .map(move |s| ((i.name.clone(), s.label.clone()), s.alternatives.len()))
        })
        .collect();
    sites.sort();
    let mut frontier: VecDeque<BTreeMap<(String, String), usize>> = VecDeque::new();
    frontier.push_back(BTreeMap::new());
    let mut seen_choices = BTreeSet::new();
    let budget = opts.limit.max(1);
    // Strategies can coincide, so generate some slack beyond the budget.
    let generate = budget.saturating_mul(8);
    let mut cut = false;
    while let Some(base) = frontier.pop_front() {
        if pending.len() + out.len() > generate {
            cut = true;
            break;
        }
        let start = sites
            .iter()
            .position(|(k, _)| base.keys().next_back().is_some_and(|last| last == k))
            .map_or(0, |i| i + 1);
        for (key, n) in &sites[start..] {
            for alt in 1..*n {
                let mut next = base.clone();
                next.insert(key.clone(), alt);
                if seen_choices.insert(next.clone()) {
                    pending.push_back(Variant::LocalVsGlobal(next.clone()));
                    frontier.push_back(next);
                }
            }
        }
    }

    let mut truncated = cut;
    while let Some(v) = pending.pop_front() {
        if out.len() >= budget {
            truncated = true;
            break;
        }
        let program = match &v {
            Variant::Canonical => continue,
            Variant::EagerInstantiate => run(&|name| Strategy {
                eager: canonical.item(name).map(|i| i.elab.wanteds.clone()),
                ..Strategy::default()
            })?,
            Variant::PermuteQuantifiers(seed) => run(&|name| Strategy {
                permute: Some(seed ^ fxhash(name)),
                ..Strategy::default()
            })?,
            Variant::LocalVsGlobal(choices) => run(&|name| Strategy {
                choices: choices
                    .iter()
                    .filter(|((i, _), _)| i == name)
                    .map(|((_, l), k)| (l.clone(), *k))
                    .collect(),
                ..Strategy::default()
            })?,
        };
        // A strategy that changed nothing relevant is the same derivation.
        let same = |a: &CheckedProgram, b: &CheckedProgram| {
            relevant.iter().all(|n| a.item(n).map(|i| &i.elab.term) == b.item(n).map(|i| &i.elab.term))
        };
        if !out.iter().any(|d| same(&d.program, &program)) {
            out.push(Derivation { variant: v, program });
        }
    }
    Ok((out, truncated))
}

/// Stable per-name seed perturbation.
fn fxhash(s: &str) -> u64 {
    s.bytes()
        .fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

fn skolem(k: usize) -> String {
    format!("#s{k}")
}

fn evidence_var(k: usize) -> String {
    format!("#ev{k}")
}

/// The reference scheme with its quantifiers replaced by the shared skolems.
fn skolemised(reference: &Scheme) -> (Vec<String>, Vec<crate::syntax::Constraint>, crate::syntax::SrcType) {
    let sk: Vec<String> = (1..=reference.quantified.len()).map(skolem).collect();
    let theta = TySubst::from_pairs(
        reference
            .quantified
            .iter()
            .cloned()
            .zip(sk.iter().map(|n| crate::syntax::SrcType::var(n.clone()))),
    );
    let ctx = reference.context().iter().map(|c| c.apply(&theta)).collect();
    (sk, ctx, reference.body().apply(&theta))
}

/// Environment in which saturated terms are typed: the program's constants,
/// the shared skolems, and one evidence variable per constraint of `reference`.
pub fn saturation_env(program: &Program, reference: &Scheme) -> TargetEnv {
    let mut env = program_target_env(program);
    let (sk, ctx, _) = skolemised(reference);
    for a in sk {
        env.push_tyvar(a);
    }
    for (k, c) in ctx.iter().enumerate() {
        env.push_term(evidence_var(k + 1), elab_constraint(c));
    }
    env
}

/// Apply the elaboration of `item` (with defs inlined) to the shared skolems
/// and evidence variables of `reference`, in the order its own scheme
/// expects them. `None` when the item's scheme is not a renaming of
/// `reference` up to the order of quantifiers and context.
pub fn saturate(program: &Program, derivation: &CheckedProgram, item: &str, reference: &Scheme) -> Option<TargetTerm> {
    let file = to_sysf(program, derivation);
    let checked = derivation.item(item)?;
    let own = &checked.elab.scheme;
    let term = inline_defs(&file, &checked.elab.term);
    let (_, ref_ctx, ref_body) = skolemised(reference);
    let vars: BTreeSet<String> = own.quantified.iter().cloned().collect();
    let mut theta = TySubst::new();
    if !match_type(own.body(), &ref_body, &vars, &mut theta) {
        return None;
    }
    let ty_args: Vec<TargetType> = own
        .quantified
        .iter()
        .map(|q| theta.get(q).map(elab_mono).unwrap_or_else(unconstrained_type))
        .collect();
    let mut args = Vec::new();
    let mut used = BTreeSet::new();
    for c in own.context() {
        let c = c.apply(&theta);
        let k = ref_ctx
            .iter()
            .enumerate()
            .position(|(i, r)| *r == c && !used.contains(&i))?;
        used.insert(k);
        args.push(TargetTerm::var(evidence_var(k + 1)));
    }
    Some(TargetTerm::apps(TargetTerm::ty_apps(term, ty_args), args))
}

/// Compare every derivation of `item` against the canonical one.
pub fn coherence_check(p: &Program, item: &str, opts: &CoherenceOptions) -> CoherenceReport {
    let report = |outcome, compared, truncated| CoherenceReport {
        item: item.to_string(),
        outcome,
        compared,
        truncated,
    };
    let (derivations, truncated) = match enumerate_derivations(p, item, opts) {
        Ok(r) => r,
        Err(e) => return report(Outcome::Skipped(SkipReason::Rejected(e)), 0, false),
    };
    let Some(canon) = derivations[0].program.item(item) else {
        return report(Outcome::Coherent, 0, false);
    };
    let reference = canon.elab.scheme.clone();
    if !is_unambiguous(&reference) {
        return report(Outcome::Skipped(SkipReason::Ambiguous(reference)), 0, false);
    }
    let nf = |d: &Derivation| -> Result<Untyped, String> {
        let t = saturate(p, &d.program, item, &reference)
            .ok_or_else(|| format!("derivation {} gives a different type", d.variant))?;
        normalize(&erase(&t), opts.fuel).map_err(|e: FuelExhausted| e.to_string())
    };
    let first = match nf(&derivations[0]) {
        Ok(n) => n,
        Err(e) => return report(Outcome::Inconclusive(e), 0, truncated),
    };
    for (i, d) in derivations.iter().enumerate().skip(1) {
        let n = match nf(d) {
            Ok(n) => n,
            Err(e) => return report(Outcome::Inconclusive(e), i, truncated),
        };
        if n != first {
            let outcome = Outcome::Incoherent {
                first: Variant::Canonical,
                second: d.variant.clone(),
                first_nf: first,
                second_nf: n,
            };
            return report(outcome, i + 1, truncated);
        }
    }
    report(Outcome::Coherent, derivations.len(), truncated)
}

/// [`coherence_check`] for every `check` item.
pub fn check_all(p: &Program, opts: &CoherenceOptions) -> Vec<CoherenceReport> {
    p.checks
        .iter()
        .map(|c| coherence_check(p, &c.name, opts))
        .collect()
}
