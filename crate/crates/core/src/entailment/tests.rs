use super::*;
use crate::surface::{parse_program, parse_target};
use crate::syntax::SrcType;

fn axioms(src: &str) -> TopAxioms {
    let prelude = "tycon Int; tycon List 1; tycon Maybe 1; tycon Pair 2; class Eq; class Ord;\n";
    parse_program(&format!("{prelude}{src}")).unwrap().axioms
}

fn c(class: &str, arg: SrcType) -> Constraint {
    Constraint::new(class, arg)
}

fn int() -> SrcType {
    SrcType::base("Int")
}

fn list(t: SrcType) -> SrcType {
    SrcType::con("List", vec![t])
}

fn a() -> SrcType {
    SrcType::var("a")
}

fn q(entries: &[(&str, Constraint)]) -> LabelledConstraints {
    entries
        .iter()
        .map(|(d, c)| (d.to_string(), c.clone()))
        .collect()
}

fn term(s: &str) -> TargetTerm {
    parse_target(s).unwrap()
}

#[test]
fn list_of_int_uses_both_instances() {
    let ax = axioms("instance $fEqInt : Eq Int; instance $fEqList : forall a. Eq a => Eq (List a);");
    let r = solve(&ax, &LabelledConstraints::new(), &c("Eq", list(int()))).unwrap();
    assert_eq!(r.evidence, term("$fEqList [Int] $fEqInt"));
    assert_eq!(r.steps.len(), 2);
}

#[test]
fn maybe_from_local_given() {
    let ax = axioms("instance $fEqMaybe : forall a. Eq a => Eq (Maybe a);");
    let r = solve(
        &ax,
        &q(&[("d", c("Eq", a()))]),
        &c("Eq", SrcType::con("Maybe", vec![a()])),
    )
    .unwrap();
    assert_eq!(r.evidence, term("$fEqMaybe [a] d"));
}

#[test]
fn reflexivity_and_failure() {
    let none = TopAxioms::empty();
    let r = solve(&none, &q(&[("d", c("Eq", a()))]), &c("Eq", a())).unwrap();
    assert_eq!(r.evidence, TargetTerm::var("d"));
    assert_eq!(
        solve(&none, &LabelledConstraints::new(), &c("Eq", int())),
        Err(SolveError::Unsolvable(c("Eq", int())))
    );
}

#[test]
fn givens_take_priority_over_instances() {
    let ax = axioms("instance $fEqInt : Eq Int;");
    let r = solve(&ax, &q(&[("d", c("Eq", int()))]), &c("Eq", int())).unwrap();
    assert_eq!(r.evidence, TargetTerm::var("d"));
}

#[test]
fn recursive_instance_hits_depth_bound() {
    // Eq (List a) needs Eq (List (List a)) needs ...
    let ax = axioms("instance $bad : forall a. Eq (List (List a)) => Eq (List a);");
    let r = solve(&ax, &LabelledConstraints::new(), &c("Eq", list(int())));
    assert!(matches!(r, Err(SolveError::DepthExceeded { .. })));
}

#[test]
fn solve_all_examples() {
    let ax = axioms("instance $fEqInt : Eq Int;");
    let eta = solve_all(
        &ax,
        &LabelledConstraints::new(),
        &q(&[("d1", c("Eq", int())), ("d2", c("Eq", int()))]),
    )
    .unwrap();
    assert_eq!(eta.get("d1"), Some(&TargetTerm::var("$fEqInt")));
    assert_eq!(eta.get("d2"), Some(&TargetTerm::var("$fEqInt")));
    assert!(solve_all(&ax, &LabelledConstraints::new(), &LabelledConstraints::new())
        .unwrap()
        .is_empty());
    assert_eq!(
        solve_all(&ax, &LabelledConstraints::new(), &q(&[("d", c("Ord", int()))])),
        Err(SolveError::Unsolvable(c("Ord", int())))
    );
}

#[test]
fn simplify_maybe_leaves_premise() {
    let ax = axioms("instance $fEqMaybe : forall a. Eq a => Eq (Maybe a);");
    let mut supply = NameSupply::avoiding(["d'".to_string()]);
    let (residual, eta) = simplify(
        &ax,
        &q(&[("d'", c("Eq", SrcType::con("Maybe", vec![a()])))]),
        &mut supply,
    )
    .unwrap();
    assert_eq!(residual.len(), 1);
    let (d, rc) = &residual.entries()[0];
    assert_eq!(*rc, c("Eq", a()));
    assert_eq!(
        eta.get("d'"),
        Some(&TargetTerm::app(
            TargetTerm::ty_app(TargetTerm::var("$fEqMaybe"), crate::syntax::TargetType::var("a")),
            TargetTerm::var(d.clone())
        ))
    );
}

#[test]
fn simplify_ground_and_variable() {
    let ax = axioms("instance $fEqInt : Eq Int;");
    let mut supply = NameSupply::new();
    let (residual, eta) = simplify(&ax, &q(&[("d", c("Eq", int()))]), &mut supply).unwrap();
    assert!(residual.is_empty());
    assert_eq!(eta.get("d"), Some(&TargetTerm::var("$fEqInt")));

    let (residual, eta) = simplify(&ax, &q(&[("d", c("Eq", a()))]), &mut supply).unwrap();
    assert_eq!(residual, q(&[("d", c("Eq", a()))]));
    assert_eq!(eta.get("d"), Some(&TargetTerm::var("d")));
}

#[test]
fn simplify_shares_identical_residuals() {
    let mut supply = NameSupply::new();
    let (residual, eta) = simplify(
        &TopAxioms::empty(),
        &q(&[("d1", c("Eq", a())), ("d2", c("Eq", a()))]),
        &mut supply,
    )
    .unwrap();
    assert_eq!(residual.len(), 1);
    assert_eq!(eta.get("d2"), Some(&TargetTerm::var("d1")));
}

#[test]
fn closure_superclass_fixed_point() {
    let ax = axioms("instance $fOrdEq : forall a. Ord a => Eq a;");
    let cl = derivable_closure(&ax, &q(&[("d", c("Ord", a()))]), 3, DEFAULT_CLOSURE_CAP).unwrap();
    assert_eq!(
        cl.entries,
        vec![
            (c("Ord", a()), TargetTerm::var("d")),
            (c("Eq", a()), term("$fOrdEq [a] d")),
        ]
    );
    assert!(!cl.truncated);
    assert_eq!(cl.depth_reached, 2);
}

#[test]
fn closure_without_axioms_is_the_seed() {
    let cl = derivable_closure(
        &TopAxioms::empty(),
        &q(&[("d", c("Eq", a()))]),
        DEFAULT_CLOSURE_DEPTH,
        DEFAULT_CLOSURE_CAP,
    )
    .unwrap();
    assert_eq!(cl.entries, vec![(c("Eq", a()), TargetTerm::var("d"))]);
    assert!(!cl.truncated);
}

#[test]
fn closure_of_growing_chain_is_truncated() {
    let ax = axioms("instance $fEqList : forall a. Eq a => Eq (List a);");
    let cl = derivable_closure(&ax, &q(&[("d", c("Eq", int()))]), 2, DEFAULT_CLOSURE_CAP).unwrap();
    assert!(cl.truncated);
    assert_eq!(cl.get(&c("Eq", list(int()))), Some(&term("$fEqList [Int] d")));
    assert_eq!(
        cl.get(&c("Eq", list(list(int())))),
        Some(&term("$fEqList [List Int] ($fEqList [Int] d)"))
    );
    assert_eq!(cl.entries.len(), 3);
}

#[test]
fn closure_cap_is_enforced() {
    let ax = axioms("instance $fEqList : forall a. Eq a => Eq (List a);");
    let r = derivable_closure(&ax, &q(&[("d", c("Eq", int()))]), 50, 10);
    assert_eq!(r, Err(ClosureError::ClosureExploded { cap: 10 }));
}

#[test]
fn closure_with_undetermined_variable_fails_closed() {
    let ax = axioms("instance $fEqPair : forall a b. (Eq a, Eq b) => Eq (Pair a b);");
    let cl = derivable_closure(&ax, &q(&[("d", c("Eq", a()))]), 3, DEFAULT_CLOSURE_CAP).unwrap();
    // Eq (Pair a a) is derivable; Eq (Pair a t) for arbitrary t is not enumerable.
    assert!(cl.contains(&c("Eq", SrcType::con("Pair", vec![a(), a()]))));
    assert!(cl.truncated);
}

#[test]
fn alternatives_list_local_and_global() {
    let ax = axioms("instance $fEqInt : Eq Int;");
    let alts = alternatives(&ax, &q(&[("d", c("Eq", int()))]), &c("Eq", int()));
    assert_eq!(alts, vec![TargetTerm::var("d"), TargetTerm::var("$fEqInt")]);
    let two = alternatives(
        &TopAxioms::empty(),
        &q(&[("d1", c("Eq", a())), ("d2", c("Eq", a()))]),
        &c("Eq", a()),
    );
    assert_eq!(two, vec![TargetTerm::var("d1"), TargetTerm::var("d2")]);
}
