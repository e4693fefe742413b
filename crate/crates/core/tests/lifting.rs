//! End-to-end lifting cases on family members and on regressions.

use padic_montes::factor::{factor, FactorConfig};
use padic_montes::montes::{montes, MontesConfig};
use padic_montes::sfl::{sfl_lift_with, LiftOptions, PrecisionMode, Variant};
use padic_montes::testpolys::{gen_family, FamilySpec};
use padic_montes::{PadicPoly, ZPoly};

#[test]
fn irreducible_member_lifts_to_itself() {
    let f = gen_family(&FamilySpec::e(5, 3).unwrap()).unwrap();
    let r = factor(
        &f,
        5,
        &FactorConfig {
            nu: 50,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(r.n_factors, 1);
    let want: Vec<String> = PadicPoly::from_zpoly(&f, 5, 50)
        .residues(50)
        .iter()
        .map(|c| c.to_string())
        .collect();
    assert_eq!(r.factors[0].coeffs, want);
}

#[test]
fn precision_one_is_the_residual_factorization() {
    let f = gen_family(&FamilySpec::b(7, 5).unwrap()).unwrap();
    let r = factor(
        &f,
        7,
        &FactorConfig {
            nu: 1,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(r.product_check);
    for g in &r.factors {
        assert!(g.coeffs.iter().all(|c| c.parse::<u64>().unwrap() < 7));
    }
}

#[test]
fn short_driver_spends_more_divisions_than_warmup() {
    let f = gen_family(&FamilySpec::b(7, 5).unwrap()).unwrap();
    let out = montes(&f, 7, &MontesConfig::default()).unwrap();
    let m = &out.factors[0];
    let run = |variant| {
        let opts = LiftOptions {
            variant,
            ..Default::default()
        };
        sfl_lift_with(&f, &m.ty, &m.phi, 400, &opts, None).unwrap()
    };
    let (warm, short) = (run(Variant::Warmup), run(Variant::Short));
    assert!(warm.phi.eq_mod(&short.phi, 400));
    assert!(
        short.records.len() > warm.records.len(),
        "{} vs {}",
        short.records.len(),
        warm.records.len()
    );
}

#[test]
fn exact_ledger_precision_with_a_fractional_inverse() {
    // the unit inverse of the first pass is built with a removable
    // denominator p; the ledger precision must still suffice
    let a = ZPoly::from_i64s(&[-42, -28, 1]);
    let b = ZPoly::from_i64s(&[127, -26, 1]);
    let f = a.mul(&b);
    let out = montes(&f, 7, &MontesConfig::default()).unwrap();
    let opts = LiftOptions {
        precision: PrecisionMode::Fixed(0),
        ..Default::default()
    };
    let mut got: Vec<_> = out
        .factors
        .iter()
        .map(|m| {
            sfl_lift_with(&f, &m.ty, &m.phi, 10, &opts, None)
                .unwrap()
                .phi
                .residues(10)
        })
        .collect();
    let mut want: Vec<_> = [a, b]
        .iter()
        .map(|g| PadicPoly::from_zpoly(g, 7, 10).residues(10))
        .collect();
    got.sort();
    want.sort();
    assert_eq!(got, want);
}

#[test]
fn large_tame_input_uses_the_index_for_its_discriminant() {
    let f = gen_family(&FamilySpec::e(5, 6).unwrap()).unwrap();
    let r = factor(
        &f,
        5,
        &FactorConfig {
            nu: 5,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(r.degree, 144);
    assert_eq!(r.disc_source, "tame");
    assert_eq!(r.index, 9378);
    // a single totally and tamely ramified prime: Δ = e − 1
    assert_eq!(r.delta, 143);
}
