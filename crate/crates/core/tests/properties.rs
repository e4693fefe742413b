//! Invariant suites: 200 randomized cases each, fixed seed.

mod common;

use common::props;

fn check(name: &str) {
    let (_, f) = props::all()
        .into_iter()
        .find(|(n, _)| *n == name)
        .expect("known property");
    if let Err(e) = f() {
        panic!("{name}: {e}");
    }
}

#[test]
fn ring_axioms() {
    check("ring axioms");
}

#[test]
fn quotrem_round_trip() {
    check("quotrem round trip");
}

#[test]
fn phi_expansion_round_trip() {
    check("phi-expansion round trip");
}

#[test]
fn gauss_lemma_for_v1() {
    check("Gauss lemma for v1");
}

#[test]
fn field_axioms_on_tower_levels() {
    check("field axioms on tower levels");
}

#[test]
fn residue_factorization_multiplies_back() {
    check("residue factorization multiplies back");
}

#[test]
fn hull_idempotence() {
    check("hull idempotence");
}

#[test]
fn supporting_lines() {
    check("supporting lines");
}

#[test]
fn ord_in_type_product_rule() {
    check("ord_in_type product rule");
}

#[test]
fn representative_criterion_matches_resultant_values() {
    check("representative criterion vs resultant");
}

#[test]
fn universal_polynomial_values() {
    check("universal polynomial values");
}

#[test]
fn montes_completeness_and_separation() {
    check("montes completeness and separation");
}

#[test]
fn lifting_surrogates() {
    check("lifting surrogates");
}

#[test]
fn product_congruence() {
    check("product congruence");
}

#[test]
fn deterministic_reports() {
    check("deterministic reports");
}

#[test]
fn every_property_has_a_test() {
    assert_eq!(props::all().len(), 15);
    assert_eq!(props::CASES, 200);
}
