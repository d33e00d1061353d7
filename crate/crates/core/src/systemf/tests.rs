use super::*;
use crate::surface::{parse_sysf, parse_target, parse_target_type};
use crate::syntax::{TargetEnv, TargetTerm, TargetType};

fn t(s: &str) -> TargetTerm {
    parse_target(s).unwrap()
}

fn ty(s: &str) -> TargetType {
    parse_target_type(s).unwrap()
}

fn u(s: &str) -> Untyped {
    erase(&t(s))
}

#[test]
fn type_application_of_identity() {
    let r = tc_target(&TargetEnv::new(), &t("(/\\a. \\(x:a). x) [Int]")).unwrap();
    assert_eq!(r, ty("Int -> Int"));
}

#[test]
fn variable_rule() {
    let env = TargetEnv::new().with_term("eqInt", ty("Dict Eq Int"));
    assert_eq!(tc_target(&env, &t("eqInt")).unwrap(), ty("Dict Eq Int"));
}

#[test]
fn argument_mismatch() {
    let env = TargetEnv::new().with_term("b", ty("Bool"));
    let r = tc_target(&env, &t("(\\(x:Int). x) b"));
    assert!(matches!(r, Err(TcError::Mismatch { .. })));
}

#[test]
fn other_type_errors() {
    let env = TargetEnv::new().with_term("b", ty("Bool"));
    assert!(matches!(tc_target(&env, &t("b b")), Err(TcError::NotAFunction { .. })));
    assert!(matches!(tc_target(&env, &t("b [Int]")), Err(TcError::NotAForall { .. })));
    assert!(matches!(tc_target(&env, &t("c")), Err(TcError::UnboundVar(_))));
    assert!(matches!(
        tc_target(&env, &t("\\(x:a). x")),
        Err(TcError::UnboundTypeVar(_))
    ));
}

#[test]
fn shadowed_type_binder_stays_distinct() {
    // Λa. λ(x:a). Λa. λ(y:a). x  :  ∀a. a → ∀a1. a1 → a
    let r = tc_target(&TargetEnv::new(), &t("/\\a. \\(x:a). /\\a. \\(y:a). x")).unwrap();
    assert!(r.alpha_eq(&ty("forall a. a -> forall b. b -> a")));
}

#[test]
fn erasure_drops_types() {
    assert_eq!(u("/\\a. x"), Untyped::free("x"));
    assert_eq!(u("f [Int]"), Untyped::free("f"));
    assert_eq!(u("\\(x:Int). x"), Untyped::lam("x", Untyped::Bound(0)));
}

#[test]
fn beta_step() {
    assert_eq!(normalize(&u("(\\(x:a). x) y"), 10).unwrap(), Untyped::free("y"));
}

#[test]
fn eta_step_respects_side_condition() {
    assert_eq!(normalize(&u("\\(x:a). f x"), 10).unwrap(), Untyped::free("f"));
    let kept = normalize(&u("\\(x:a). x x"), 10).unwrap();
    assert_eq!(kept, u("\\(x:a). x x"));
}

#[test]
fn omega_runs_out_of_fuel() {
    let omega = u("(\\(x:a). x x) (\\(x:a). x x)");
    assert_eq!(normalize(&omega, 1000), Err(FuelExhausted { fuel: 1000 }));
}

#[test]
fn equivalence_examples() {
    let ev = t("show [Int] eqInt");
    let with_d = t("show [Int] d");
    let eta = crate::syntax::EvSubst::singleton("d", t("eqInt"));
    assert!(equiv(&ev, &eta.apply(&with_d), DEFAULT_FUEL).unwrap());
    assert!(equiv(&t("\\(x:Int). x"), &t("\\(y:Bool). y"), DEFAULT_FUEL).unwrap());
    assert!(equiv(&t("show [Int] eqInt"), &t("show [Bool] eqInt"), DEFAULT_FUEL).unwrap());
    assert!(!equiv(&t("x"), &t("y"), DEFAULT_FUEL).unwrap());
}

#[test]
fn nested_eta_contracts_fully() {
    assert_eq!(
        normalize(&u("\\(x:a) (y:b). f x y"), 10).unwrap(),
        Untyped::free("f")
    );
}

#[test]
fn beta_under_binder_avoids_capture() {
    // (λx. λy. x) y  ⇝  λz. y
    let n = normalize(&u("(\\(x:a). \\(y:a). x) y"), 10).unwrap();
    assert_eq!(n, Untyped::lam("z", Untyped::free("y")));
    assert_eq!(n.to_string(), "\\y1. y");
}

#[test]
fn sysf_file_checks_and_inlines() {
    let f = parse_sysf(
        "val eqInt : Dict Eq Int;\n\
         def id : forall a. a -> a = /\\a. \\(x:a). x;\n\
         def k : Dict Eq Int = id [Dict Eq Int] eqInt;\n\
         k;",
    )
    .unwrap();
    check_sysf_file(&f).unwrap();
    let main = inline_defs(&f, f.main.as_ref().unwrap());
    assert!(main.free_vars().iter().all(|v| v == "eqInt"));
    assert!(equiv(&main, &t("eqInt"), DEFAULT_FUEL).unwrap());

    let bad = parse_sysf("val eqInt : Dict Eq Int; def k : Int = eqInt;").unwrap();
    assert_eq!(check_sysf_file(&bad).unwrap_err().0, "k");
}
