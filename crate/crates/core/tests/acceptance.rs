//! Acceptance criteria. Runs without the libtest harness and prints one
//! `criterion N: PASS|FAIL` line per criterion; exits non-zero on any failure.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::PathBuf;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use dictelab::coherence::{
    check_all, coherence_check, enumerate_derivations, saturate, CoherenceOptions, Outcome, SkipReason, Variant,
};
use dictelab::elaborate::{elab_constraint, elab_env, elab_subst};
use dictelab::entailment::{solve, solve_all};
use dictelab::gen;
use dictelab::surface::{
    parse_program, parse_target, pretty_program, pretty_target, Program, ProgramError,
};
use dictelab::syntax::{
    Constraint, EvSubst, LabelledConstraints, SrcExpr, SrcType, TargetEnv, TargetTerm, TargetType, TopAxioms,
    TySubst, TypeEnv,
};
use dictelab::systemf::{check_sysf_file, equiv, tc_target, DEFAULT_FUEL};
use dictelab::typecheck::{check_program, is_unambiguous, to_sysf, CheckOptions, TypeError};

const LAW_CASES: usize = 500;
const TERM_CASES: usize = 500;
const ROUND_TRIPS: usize = 1000;
const MIN_CORPUS: usize = 30;
const MIN_MULTI_VARIANT: usize = 10;
const ORACLE_FUEL: usize = 200_000;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("rejections with golden diagnostics", c1_rejections),
        ("ambiguous principal scheme", c2_ambiguity),
        ("Top-rule simplification shape", c3_top_shape),
        ("entailment laws", c4_entailment_laws),
        ("type preservation over the corpus", c5_type_preservation),
        ("equivalence kernel", c6_equivalence),
        ("coherence at desk scale", c7_coherence),
        ("parse/pretty round trip", c8_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS ({name}; {detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL ({name}): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn corpus_text(name: &str) -> String {
    fs::read_to_string(corpus_dir().join(format!("{name}.dict"))).expect("corpus file")
}

fn corpus_program(name: &str) -> Program {
    parse_program(&corpus_text(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Every corpus program that parses, by file stem.
fn corpus() -> Vec<(String, Program)> {
    let mut out = Vec::new();
    let mut entries: Vec<_> = fs::read_dir(corpus_dir()).unwrap().map(|e| e.unwrap().path()).collect();
    entries.sort();
    for path in entries {
        if path.extension().and_then(|e| e.to_str()) != Some("dict") {
            continue;
        }
        let name = path.file_stem().unwrap().to_string_lossy().to_string();
        if let Ok(p) = parse_program(&fs::read_to_string(&path).unwrap()) {
            out.push((name, p));
        }
    }
    out
}

fn guarded() -> CheckOptions {
    CheckOptions::default()
}

fn unguarded() -> CheckOptions {
    CheckOptions {
        guard: false,
        ..CheckOptions::default()
    }
}

// ---- 1 ----

fn c1_rejections() -> Verdict {
    let golden = [
        (
            "foo",
            "in `use`: unsafe dictionary application for Eq Int: Eq Int follows from the supplied \
             dictionary (dict) but also from the remaining constraints ($fEqInt); the instances alone give $fEqInt",
            "Eq Int",
        ),
        (
            "two",
            "in `use`: unsafe dictionary application for Eq a: Eq a follows from the supplied \
             dictionary (dict) but also from the remaining constraints (ctx2)",
            "Eq a",
        ),
        (
            "three",
            "in `use`: unsafe dictionary application for Eq a: Eq a follows from the supplied \
             dictionary (dict) but also from the remaining constraints ($fOrdEq [a] ctx2)",
            "Eq a",
        ),
        (
            "five",
            "in `use`: unsafe dictionary application for Eq a: Eq a follows from the supplied \
             dictionary (dict) but also from the remaining constraints ($fEqAll [a]); the instances alone give $fEqAll [a]",
            "Eq a",
        ),
    ];
    for (name, message, witness) in golden {
        let p = corpus_program(name);
        let err = check_program(&p, &guarded()).err().ok_or(format!("{name} was accepted"))?;
        ensure(err.to_string() == message, || format!("{name}: got `{err}`"))?;
        let TypeError::Unsafe(report) = &err.error else {
            return Err(format!("{name}: not a safety violation: {err}"));
        };
        let w = report.witness.as_ref().ok_or(format!("{name}: no witness"))?;
        ensure(w.constraint.to_string() == witness, || format!("{name}: witness {}", w.constraint))?;
        // The rest alone must not need the dictionary, the dictionary side must.
        ensure(!w.from_rest.free_vars().contains("dict"), || format!("{name}: rest uses dict"))?;
        ensure(w.from_dict.free_vars().contains("dict"), || format!("{name}: dict side lacks dict"))?;
        // Without the guard the same program is accepted.
        check_program(&p, &unguarded()).map_err(|e| format!("{name} unguarded: {e}"))?;
    }
    match parse_program(&corpus_text("four")) {
        Err(e @ ProgramError::Parse(_)) => {
            ensure(e.to_string() == "4:21: equality constraints are not supported", || {
                format!("four: got `{e}`")
            })?
        }
        other => return Err(format!("four: expected a parse error, got {other:?}")),
    }
    Ok("foo, two, three, five unsafe; four rejected at parse".into())
}

// ---- 2 ----

fn c2_ambiguity() -> Verdict {
    let p = corpus_program("show_read");
    let c = check_program(&p, &guarded()).map_err(|e| e.to_string())?;
    let s = &c.item("c").unwrap().elab.scheme;
    ensure(s.to_string() == "forall a. (Show a, Read a) => String -> String", || format!("scheme {s}"))?;
    ensure(!is_unambiguous(s), || "reported unambiguous".into())?;
    let r = coherence_check(&p, "c", &CoherenceOptions::default());
    ensure(matches!(&r.outcome, Outcome::Skipped(SkipReason::Ambiguous(a)) if a == s), || {
        format!("coherence outcome {:?}", r.outcome)
    })?;
    Ok(format!("{s}, skipped"))
}

// ---- 3 ----

fn c3_top_shape() -> Verdict {
    let p = corpus_program("eq_maybe");
    let c = check_program(&p, &guarded()).map_err(|e| e.to_string())?;
    let eqm = &c.item("eqm").unwrap().elab;
    ensure(eqm.scheme.to_string() == "forall a. Eq a => a -> Bool", || format!("scheme {}", eqm.scheme))?;
    // t, typed under d' : Eq (Maybe a), then η = [d' ↦ $fEqMaybe a d].
    let a = || TargetType::var("a");
    let maybe_a = TargetType::con("Maybe", vec![a()]);
    let just_x = || TargetTerm::app(TargetTerm::ty_app(TargetTerm::var("just"), a()), TargetTerm::var("x"));
    let t = TargetTerm::lam(
        "x",
        a(),
        TargetTerm::apps(
            TargetTerm::ty_app(TargetTerm::var("eq"), maybe_a),
            [TargetTerm::var("dq"), just_x(), just_x()],
        ),
    );
    let eta = EvSubst::singleton(
        "dq",
        TargetTerm::app(TargetTerm::ty_app(TargetTerm::var("$fEqMaybe"), a()), TargetTerm::var("d")),
    );
    let expected = TargetTerm::ty_lam("a", TargetTerm::lam("d", TargetType::dict("Eq", a()), eta.apply(&t)));
    ensure(eqm.term.alpha_eq(&expected), || {
        format!("got {}, expected {}", eqm.term, expected)
    })?;
    Ok(format!("{}", eqm.term))
}

// ---- 4 ----

fn tyvar_env(axioms: &TopAxioms, q: &LabelledConstraints) -> TargetEnv {
    let mut env = TargetEnv::new();
    for v in gen::TYVARS {
        env.push_tyvar(*v);
    }
    env.append(&elab_env(axioms, q, &TypeEnv::new()));
    env
}

/// The evidence has the dictionary type of `c` in the environment of `q`.
fn evidence_ok(axioms: &TopAxioms, q: &LabelledConstraints, ev: &TargetTerm, c: &Constraint) -> bool {
    tc_target(&tyvar_env(axioms, q), ev).is_ok_and(|t| t.alpha_eq(&elab_constraint(c)))
}

fn ground_subst(rng: &mut StdRng) -> TySubst {
    TySubst::from_pairs(gen::TYVARS.iter().map(|v| (v.to_string(), gen::data_type(rng, &[], 2))))
}

fn c4_entailment_laws() -> Verdict {
    let mut rng = StdRng::seed_from_u64(4);
    let vars = &gen::TYVARS[..2];

    // Reflexivity: each given solves to the first label carrying it.
    for case in 0..LAW_CASES {
        let axioms = gen::axioms(&mut rng);
        let mut q = gen::givens(&mut rng, vars, 4, "d");
        if q.is_empty() {
            q.push("d1", gen::constraint(&mut rng, vars, 2));
        }
        for (_, c) in q.iter() {
            let first = q.iter().find(|(_, g)| g == c).map(|(d, _)| d.clone()).unwrap();
            let r = solve(&axioms, &q, c).map_err(|e| format!("reflexivity case {case}: {e}"))?;
            ensure(r.evidence == TargetTerm::var(first.clone()), || {
                format!("reflexivity case {case}: {c} gave {} not {first}", r.evidence)
            })?;
        }
    }

    // Transitivity: Q1 ⊩ Q2 and Q2 ⊩ Q3 give Q1 ⊩ Q3 through the composed evidence.
    let mut transitive = 0;
    let mut attempts = 0;
    while transitive < LAW_CASES {
        attempts += 1;
        ensure(attempts < LAW_CASES * 40, || format!("transitivity: only {transitive} cases after {attempts} attempts"))?;
        let axioms = gen::axioms(&mut rng);
        let q1 = gen::givens(&mut rng, vars, 3, "g");
        let mut q2 = LabelledConstraints::new();
        let mut eta2 = EvSubst::new();
        for i in 0..rng.gen_range(1..4) {
            let c = gen::constraint(&mut rng, vars, 2);
            if let Ok(r) = solve(&axioms, &q1, &c) {
                let label = format!("e{}", i + 1);
                eta2.insert(label.clone(), r.evidence);
                q2.push(label, c);
            }
        }
        if q2.is_empty() {
            continue;
        }
        // Goals built on top of Q2: a member, or a constructor applied to one.
        let base = q2.entries()[rng.gen_range(0..q2.len())].1.clone();
        let c3 = if rng.gen() {
            base
        } else {
            let con = if rng.gen() { "List" } else { "Maybe" };
            Constraint::new(base.class.clone(), SrcType::con(con, vec![base.arg.clone()]))
        };
        let Ok(r3) = solve(&axioms, &q2, &c3) else {
            continue;
        };
        transitive += 1;
        let composed = eta2.apply(&r3.evidence);
        ensure(evidence_ok(&axioms, &q1, &composed, &c3), || {
            format!("transitivity: {} is not evidence for {c3}", composed)
        })?;
        solve(&axioms, &q1, &c3).map_err(|e| format!("transitivity: direct solve failed: {e}"))?;
    }

    // Substitution: solutions survive ground substitutions.
    let mut substituted_cases = 0;
    let mut strict = 0;
    attempts = 0;
    while substituted_cases < LAW_CASES {
        attempts += 1;
        ensure(attempts < LAW_CASES * 40, || format!("substitution: only {substituted_cases} cases"))?;
        let axioms = gen::axioms(&mut rng);
        let q = if rng.gen() {
            LabelledConstraints::new()
        } else {
            gen::givens(&mut rng, vars, 3, "d")
        };
        let c = gen::constraint(&mut rng, vars, 2);
        let Ok(r) = solve(&axioms, &q, &c) else {
            continue;
        };
        substituted_cases += 1;
        let theta = ground_subst(&mut rng);
        let (tq, tc) = (q.apply(&theta), c.apply(&theta));
        let rt = solve(&axioms, &tq, &tc).map_err(|e| format!("substitution: {c} under θ: {e}"))?;
        let substituted = r.evidence.subst_types(&elab_subst(&theta));
        ensure(evidence_ok(&axioms, &tq, &substituted, &tc), || {
            format!("substitution: θ(e) = {substituted} is not evidence for {tc}")
        })?;
        if q.is_empty() {
            strict += 1;
            ensure(rt.evidence.alpha_eq(&substituted), || {
                format!("substitution: {} vs θ(e) = {substituted}", rt.evidence)
            })?;
        }
    }

    // Conjunction: solving a conjunction succeeds iff every conjunct does.
    let mut both = [0usize; 2];
    for case in 0..LAW_CASES {
        let axioms = gen::axioms(&mut rng);
        let q = gen::givens(&mut rng, vars, 3, "d");
        let ws = gen::givens(&mut rng, vars, 4, "w");
        let each: Vec<_> = ws.iter().map(|(_, c)| solve(&axioms, &q, c)).collect();
        let all = solve_all(&axioms, &q, &ws);
        let each_ok = each.iter().all(|r| r.is_ok());
        ensure(all.is_ok() == each_ok, || format!("conjunction case {case}: conjunction disagrees"))?;
        both[usize::from(each_ok)] += 1;
        if let Ok(eta) = all {
            for ((w, _), r) in ws.iter().zip(&each) {
                ensure(eta.get(w) == Some(&r.as_ref().unwrap().evidence), || format!("conjunction case {case}: {w}"))?;
            }
        }
        // Determinism: a second run gives identical results.
        let again: Vec<_> = ws.iter().map(|(_, c)| solve(&axioms, &q, c)).collect();
        ensure(again == each, || format!("conjunction case {case}: solver not deterministic"))?;
    }
    ensure(both[0] > 0 && both[1] > 0, || format!("conjunction only saw one outcome: {both:?}"))?;
    Ok(format!(
        "reflexivity {LAW_CASES}, transitivity {transitive}, substitution {substituted_cases} ({strict} without givens), conjunction {LAW_CASES} ({} solvable)",
        both[1]
    ))
}

// ---- 5 ----

fn c5_type_preservation() -> Verdict {
    let mut programs = 0;
    let mut derivations = 0;
    for (name, p) in corpus() {
        let Ok(checked) = check_program(&p, &guarded()) else {
            continue;
        };
        programs += 1;
        check_sysf_file(&to_sysf(&p, &checked)).map_err(|(i, e)| format!("{name}: `{i}`: {e}"))?;
        derivations += checked.items.len();
        let opts = CoherenceOptions {
            check: unguarded(),
            ..CoherenceOptions::default()
        };
        for c in &p.checks {
            let (ds, _) = enumerate_derivations(&p, &c.name, &opts).map_err(|e| format!("{name}: {e}"))?;
            for d in ds {
                check_sysf_file(&to_sysf(&p, &d.program))
                    .map_err(|(i, e)| format!("{name} ({}): `{i}`: {e}", d.variant))?;
                derivations += 1;
            }
        }
    }
    ensure(programs >= MIN_CORPUS, || format!("only {programs} corpus programs typecheck"))?;
    Ok(format!("{programs} programs, {derivations} elaborations typecheck"))
}

// ---- 6 ----

/// Untyped λ-terms with names, for an independent βη normaliser.
#[derive(Clone, Debug)]
enum U {
    V(String),
    L(String, Box<U>),
    A(Box<U>, Box<U>),
}

fn erase_oracle(t: &TargetTerm) -> U {
    match t {
        TargetTerm::Var(x) => U::V(x.clone()),
        TargetTerm::Lam(x, _, b) => U::L(x.clone(), Box::new(erase_oracle(b))),
        TargetTerm::App(f, a) => U::A(Box::new(erase_oracle(f)), Box::new(erase_oracle(a))),
        TargetTerm::TyLam(_, b) | TargetTerm::TyApp(b, _) => erase_oracle(b),
    }
}

fn fv(u: &U) -> BTreeSet<String> {
    match u {
        U::V(x) => BTreeSet::from([x.clone()]),
        U::L(x, b) => {
            let mut s = fv(b);
            s.remove(x);
            s
        }
        U::A(f, a) => fv(f).union(&fv(a)).cloned().collect(),
    }
}

struct Oracle {
    fuel: usize,
    next: usize,
}

impl Oracle {
    fn subst(&mut self, u: &U, x: &str, s: &U, fv_s: &BTreeSet<String>) -> U {
        match u {
            U::V(y) if y == x => s.clone(),
            U::V(_) => u.clone(),
            U::A(f, a) => U::A(Box::new(self.subst(f, x, s, fv_s)), Box::new(self.subst(a, x, s, fv_s))),
            U::L(y, _) if y == x => u.clone(),
            U::L(y, b) => {
                if fv_s.contains(y) {
                    self.next += 1;
                    let z = format!("%{}", self.next);
                    let b = self.subst(b, y, &U::V(z.clone()), &BTreeSet::from([z.clone()]));
                    U::L(z, Box::new(self.subst(&b, x, s, fv_s)))
                } else {
                    U::L(y.clone(), Box::new(self.subst(b, x, s, fv_s)))
                }
            }
        }
    }

    /// Normal order to βη-normal form.
    fn nf(&mut self, u: U) -> Result<U, String> {
        match u {
            U::V(_) => Ok(u),
            U::L(x, b) => {
                let b = self.nf(*b)?;
                if let U::A(f, a) = &b {
                    if matches!(&**a, U::V(y) if *y == x) && !fv(f).contains(&x) {
                        return Ok((**f).clone());
                    }
                }
                Ok(U::L(x, Box::new(b)))
            }
            U::A(f, a) => {
                let f = self.whnf(*f)?;
                if let U::L(x, b) = f {
                    self.tick()?;
                    let fv_a = fv(&a);
                    let r = self.subst(&b, &x, &a, &fv_a);
                    return self.nf(r);
                }
                let f = self.nf(f)?;
                if let U::L(..) = f {
                    return self.nf(U::A(Box::new(f), a));
                }
                Ok(U::A(Box::new(f), Box::new(self.nf(*a)?)))
            }
        }
    }

    fn whnf(&mut self, u: U) -> Result<U, String> {
        match u {
            U::A(f, a) => {
                let f = self.whnf(*f)?;
                match f {
                    U::L(x, b) => {
                        self.tick()?;
                        let fv_a = fv(&a);
                        let r = self.subst(&b, &x, &a, &fv_a);
                        self.whnf(r)
                    }
                    f => Ok(U::A(Box::new(f), a)),
                }
            }
            u => Ok(u),
        }
    }

    fn tick(&mut self) -> Result<(), String> {
        if self.fuel == 0 {
            return Err("oracle ran out of fuel".into());
        }
        self.fuel -= 1;
        Ok(())
    }
}

fn alpha(a: &U, b: &U, env_a: &mut Vec<String>, env_b: &mut Vec<String>) -> bool {
    match (a, b) {
        (U::V(x), U::V(y)) => {
            let ix = env_a.iter().rposition(|v| v == x);
            let iy = env_b.iter().rposition(|v| v == y);
            match (ix, iy) {
                (Some(i), Some(j)) => env_a.len() - i == env_b.len() - j,
                (None, None) => x == y,
                _ => false,
            }
        }
        (U::L(x, p), U::L(y, q)) => {
            env_a.push(x.clone());
            env_b.push(y.clone());
            let r = alpha(p, q, env_a, env_b);
            env_a.pop();
            env_b.pop();
            r
        }
        (U::A(f, x), U::A(g, y)) => alpha(f, g, env_a, env_b) && alpha(x, y, env_a, env_b),
        _ => false,
    }
}

fn oracle_nf(t: &TargetTerm) -> Result<U, String> {
    Oracle {
        fuel: ORACLE_FUEL,
        next: 0,
    }
    .nf(erase_oracle(t))
}

fn oracle_equiv(t1: &TargetTerm, t2: &TargetTerm) -> Result<bool, String> {
    Ok(alpha(&oracle_nf(t1)?, &oracle_nf(t2)?, &mut vec![], &mut vec![]))
}

fn lib_equiv(t1: &TargetTerm, t2: &TargetTerm) -> Result<bool, String> {
    equiv(t1, t2, DEFAULT_FUEL).map_err(|e| e.to_string())
}

fn c6_equivalence() -> Verdict {
    let t = |s: &str| parse_target(s).unwrap();
    // Rule instances: (left, right, equivalent)
    let rules = [
        ("(\\(x:Int). f x x) y", "f y y", true),
        ("\\(x:Int). f x", "f", true),
        ("\\(x:Int). x x", "x", false),
        ("\\(x:Int). f x x", "f x", false),
        ("/\\a. \\(x:a). x", "\\(y:Bool). y", true),
        ("f [Int] [Bool] x", "f x", true),
        ("(/\\a. \\(x:a). g x) [Int] y", "g y", true),
        ("h ((\\(x:Int). x) y) z", "h y z", true),
        ("\\(x:Int). (\\(y:Int). f y) x", "f", true),
        ("x", "y", false),
        ("\\(x:Int) (y:Int). x", "\\(y:Int) (x:Int). y", true),
        ("\\(x:Int) (y:Int). x", "\\(x:Int) (y:Int). y", false),
        ("show [Int] eqInt", "show [Bool] eqInt", true),
    ];
    for (l, r, want) in rules {
        let (l, r) = (t(l), t(r));
        let got = lib_equiv(&l, &r)?;
        ensure(got == want, || format!("{l} ≈ {r}: got {got}"))?;
        ensure(oracle_equiv(&l, &r)? == want, || format!("oracle disagrees on {l} ≈ {r}"))?;
        ensure(lib_equiv(&r, &l)? == want, || format!("not symmetric on {l}, {r}"))?;
    }
    // [d ↦ eqInt](show Int d) ≈ show Int eqInt
    let open = t("show [Int] d");
    let closed = EvSubst::singleton("d", t("eqInt")).apply(&open);
    ensure(lib_equiv(&closed, &t("show [Int] eqInt"))?, || "evidence substitution".into())?;

    let env = gen::term_env();
    let mut rng = StdRng::seed_from_u64(6);
    for case in 0..TERM_CASES {
        let (t1, ty) = gen::typed_term(&mut rng, 4);
        let got = tc_target(&env, &t1).map_err(|e| format!("case {case}: {t1}: {e}"))?;
        ensure(got.alpha_eq(&ty), || format!("case {case}: {t1} has {got}, generated at {ty}"))?;
        // Variants equivalent by construction.
        let id_ty = TargetType::forall("z", TargetType::arrow(TargetType::var("z"), TargetType::var("z")));
        let t2 = TargetTerm::app(TargetTerm::ty_app(TargetTerm::var("id"), ty.clone()), t1.clone());
        let t3 = TargetTerm::app(TargetTerm::lam("v%", ty.clone(), TargetTerm::var("v%")), t2.clone());
        let t4 = TargetTerm::ty_app(TargetTerm::ty_lam("u%", t1.clone()), id_ty);
        for (i, v) in [&t2, &t3, &t4].into_iter().enumerate() {
            tc_target(&env, v).map_err(|e| format!("case {case}: variant {i}: {e}"))?;
        }
        let lib = |a: &TargetTerm, b: &TargetTerm| lib_equiv(a, b);
        ensure(oracle_equiv(&t1, &t1)? && lib(&t1, &t1)?, || format!("case {case}: not reflexive: {t1}"))?;
        // `id` is opaque here, so only t3 ≈ t2 and t4 ≈ t1 hold syntactically.
        ensure(lib(&t3, &t2)? && lib(&t2, &t3)?, || format!("case {case}: β/symmetry"))?;
        ensure(lib(&t4, &t1)?, || format!("case {case}: type erasure"))?;
        ensure(oracle_equiv(&t3, &t2)? && oracle_equiv(&t4, &t1)?, || format!("case {case}: oracle"))?;
        // Transitivity through the chain t1 ≈ t4 and t4 ≈ (λv. v) t1.
        let t5 = TargetTerm::app(TargetTerm::lam("w%", ty.clone(), TargetTerm::var("w%")), t4.clone());
        ensure(lib(&t4, &t5)? && lib(&t1, &t5)?, || format!("case {case}: transitivity"))?;
        // Congruence: applying both sides of an equivalence to the same argument.
        if let TargetType::Arrow(dom, _) = &ty {
            let mut g = StdRng::seed_from_u64(case as u64);
            let (arg, _) = loop {
                let (a, aty) = gen::typed_term(&mut g, 2);
                if aty.alpha_eq(dom) {
                    break (a, aty);
                }
                if g.gen_ratio(1, 50) {
                    break (TargetTerm::var("arg%"), (**dom).clone());
                }
            };
            let l = TargetTerm::app(t1.clone(), arg.clone());
            let r = TargetTerm::app(t4.clone(), arg);
            ensure(lib(&l, &r)?, || format!("case {case}: congruence"))?;
        }
        // The library and the oracle agree on an unrelated pair.
        let (other, _) = gen::typed_term(&mut rng, 3);
        ensure(lib(&t1, &other)? == oracle_equiv(&t1, &other)?, || {
            format!("case {case}: oracle disagrees on {t1} vs {other}")
        })?;
    }

    // Erase-theta on the corpus: instantiating the outer type abstractions
    // preserves equivalence.
    let mut erased = 0;
    let mut rng = StdRng::seed_from_u64(66);
    for (name, p) in corpus() {
        let Ok(checked) = check_program(&p, &guarded()) else {
            continue;
        };
        for item in &checked.items {
            let mut body = &item.elab.term;
            let mut binders = Vec::new();
            while let TargetTerm::TyLam(a, b) = body {
                binders.push(a.clone());
                body = b;
            }
            let theta: BTreeMap<String, TargetType> = binders
                .iter()
                .map(|a| (a.clone(), dictelab::elaborate::elab_mono(&gen::data_type(&mut rng, &[], 2))))
                .collect();
            let inst = body.subst_types(&theta);
            ensure(lib_equiv(body, &inst)? && lib_equiv(&item.elab.term, &inst)?, || {
                format!("{name}: `{}` changes under θ", item.name)
            })?;
            ensure(oracle_equiv(&item.elab.term, &inst)?, || format!("{name}: oracle, `{}`", item.name))?;
            erased += 1;
        }
    }
    Ok(format!(
        "{} rule instances, {TERM_CASES} generated terms, erase-theta on {erased} corpus terms",
        rules.len()
    ))
}

// ---- 7 ----

fn contains_dictapp(e: &SrcExpr) -> bool {
    match e {
        SrcExpr::Var(_) => false,
        SrcExpr::Lam(_, b) | SrcExpr::Annot(b, _) => contains_dictapp(b),
        SrcExpr::App(f, a) => contains_dictapp(f) || contains_dictapp(a),
        SrcExpr::DictApp { .. } => true,
    }
}

fn program_uses_dictapp(p: &Program) -> bool {
    p.defs.iter().any(|d| contains_dictapp(&d.body)) || p.checks.iter().any(|c| contains_dictapp(&c.body))
}

fn c7_coherence() -> Verdict {
    let opts = CoherenceOptions::default();
    let mut multi = 0;
    let (mut permute, mut eager, mut dictapp) = (0, 0, 0);
    let mut pairs = 0;
    for (name, p) in corpus() {
        if check_program(&p, &guarded()).is_err() {
            continue;
        }
        let mut has_multi = false;
        for r in check_all(&p, &opts) {
            match &r.outcome {
                Outcome::Coherent => {}
                Outcome::Skipped(SkipReason::Ambiguous(_)) => continue,
                other => return Err(format!("{name}/{}: {other:?}", r.item)),
            }
            let (ds, _) = enumerate_derivations(&p, &r.item, &opts).map_err(|e| e.to_string())?;
            if ds.len() < 2 {
                continue;
            }
            has_multi = true;
            permute += ds.iter().any(|d| matches!(d.variant, Variant::PermuteQuantifiers(_))) as usize;
            eager += ds.iter().any(|d| d.variant == Variant::EagerInstantiate) as usize;
            // Independent pairwise comparison of the saturated terms.
            let reference = ds[0].program.item(&r.item).unwrap().elab.scheme.clone();
            let nfs: Vec<U> = ds
                .iter()
                .map(|d| {
                    let s = saturate(&p, &d.program, &r.item, &reference)
                        .ok_or(format!("{name}/{}: {} does not saturate", r.item, d.variant))?;
                    oracle_nf(&s)
                })
                .collect::<Result<_, _>>()?;
            for i in 0..nfs.len() {
                for j in i + 1..nfs.len() {
                    pairs += 1;
                    ensure(alpha(&nfs[i], &nfs[j], &mut vec![], &mut vec![]), || {
                        format!("{name}/{}: {} and {} differ", r.item, ds[i].variant, ds[j].variant)
                    })?;
                }
            }
        }
        if has_multi {
            multi += 1;
            dictapp += program_uses_dictapp(&p) as usize;
        }
    }
    ensure(multi >= MIN_MULTI_VARIANT, || format!("only {multi} multi-variant programs"))?;
    ensure(permute > 0 && eager > 0 && dictapp > 0, || {
        format!("coverage: permute {permute}, eager {eager}, dictapp {dictapp}")
    })?;

    let unsafe_opts = CoherenceOptions {
        check: unguarded(),
        ..CoherenceOptions::default()
    };
    for name in ["foo", "two"] {
        let p = corpus_program(name);
        let r = coherence_check(&p, "use", &unsafe_opts);
        let Outcome::Incoherent {
            first_nf, second_nf, ..
        } = &r.outcome
        else {
            return Err(format!("{name} unguarded: {:?}", r.outcome));
        };
        ensure(first_nf != second_nf, || format!("{name}: identical normal forms"))?;
    }
    Ok(format!(
        "{multi} multi-variant programs ({dictapp} with dictionary applications), permuted variants in \
         {permute} items, eager variants in {eager} items, {pairs} pairs equal; foo and two incoherent unguarded"
    ))
}

// ---- 8 ----

fn c8_round_trip() -> Verdict {
    let mut rng = StdRng::seed_from_u64(8);
    for case in 0..ROUND_TRIPS {
        let p = gen::program(&mut rng);
        let text = pretty_program(&p);
        let back = parse_program(&text).map_err(|e| format!("program {case}: {e}\n{text}"))?;
        ensure(back == p, || format!("program {case} differs after round trip:\n{text}"))?;
    }
    for case in 0..ROUND_TRIPS {
        let t = gen::target_term(&mut rng, 5);
        let text = pretty_target(&t);
        let back = parse_target(&text).map_err(|e| format!("term {case}: {e}: {text}"))?;
        ensure(back == t, || format!("term {case} differs: {text}"))?;
    }
    Ok(format!("{ROUND_TRIPS} programs, {ROUND_TRIPS} terms"))
}
