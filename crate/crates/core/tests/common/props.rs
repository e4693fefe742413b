//! Randomized invariant checks, each driven by a proptest runner with a fixed
//! seed. Shared by the property suite and the acceptance summary.

use num_bigint::BigInt;
use num_rational::Rational64;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use padic_montes::factor::{factor, product_matches, FactorConfig};
use padic_montes::montes::{montes, MontesConfig, MontesFactor};
use padic_montes::omtype::{OMType, Val};
use padic_montes::polygon::{line_touch_value, lower_hull, PolygonPoint};
use padic_montes::sfl::{sfl_lift_with, LiftOptions};
use padic_montes::testpolys::{gen_family, FamilySpec};
use padic_montes::tower::{FFElem, FFTowerField};
use padic_montes::{PadicPoly, ZPoly};

use super::{random_known_pair, resultant_oracle, vp};

pub const CASES: u32 = 200;
pub const SEED: u64 = 0x0a11_5eed;

pub fn runner() -> TestRunner {
    TestRunner::new(Config {
        cases: CASES,
        rng_seed: RngSeed::Fixed(SEED),
        failure_persistence: None,
        ..Config::default()
    })
}

type Check = fn() -> Result<(), String>;

/// Every invariant check, by name.
pub fn all() -> Vec<(&'static str, Check)> {
    vec![
        ("ring axioms", ring_axioms as Check),
        ("quotrem round trip", quotrem_round_trip),
        ("phi-expansion round trip", phi_expansion_round_trip),
        ("Gauss lemma for v1", gauss_v1),
        ("field axioms on tower levels", field_axioms),
        (
            "residue factorization multiplies back",
            ff_factor_multiplies_back,
        ),
        ("hull idempotence", hull_idempotence),
        ("supporting lines", supporting_lines),
        ("ord_in_type product rule", ord_product_rule),
        (
            "representative criterion vs resultant",
            representative_criterion,
        ),
        ("universal polynomial values", universal_values),
        ("montes completeness and separation", montes_separation),
        ("lifting surrogates", lifting_surrogates),
        ("product congruence", product_congruence),
        ("deterministic reports", deterministic_reports),
    ]
}

fn run<S: Strategy>(
    s: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner().run(&s, test).map_err(|e| e.to_string())
}

fn primes() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7, 11])
}

fn coeffs(max_len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-10_000i64..10_000, 0..max_len)
}

fn pp(p: u64, prec: u32, c: &[i64]) -> PadicPoly {
    PadicPoly::from_ints(p, prec, c)
}

fn monic(c: &[i64]) -> Vec<i64> {
    let mut c = c.to_vec();
    c.push(1);
    c
}

fn ring_axioms() -> Result<(), String> {
    run(
        (primes(), 1u32..40, coeffs(7), coeffs(7), coeffs(7)),
        |(p, k, a, b, c)| {
            let (a, b, c) = (pp(p, k, &a), pp(p, k, &b), pp(p, k, &c));
            prop_assert!(a.add(&b).add(&c).eq_mod(&a.add(&b.add(&c)), k));
            prop_assert!(a.mul(&b.add(&c)).eq_mod(&a.mul(&b).add(&a.mul(&c)), k));
            prop_assert!(a.mul(&b).eq_mod(&b.mul(&a), k));
            prop_assert!(a.mul(&b).mul(&c).eq_mod(&a.mul(&b.mul(&c)), k));
            prop_assert!(a.sub(&a).eq_mod(&PadicPoly::zero(p, k), k));
            Ok(())
        },
    )
}

fn quotrem_round_trip() -> Result<(), String> {
    run(
        (primes(), 1u32..40, coeffs(12), coeffs(5)),
        |(p, k, f, g)| {
            let (f, g) = (pp(p, k, &f), pp(p, k, &monic(&g)));
            let (q, r) = f
                .quotrem(&g)
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert!(q.mul(&g).add(&r).eq_mod(&f, k));
            prop_assert!(r.degree().is_none_or(|d| d < g.degree().unwrap()));
            Ok(())
        },
    )
}

fn phi_expansion_round_trip() -> Result<(), String> {
    run(
        (
            primes(),
            1u32..30,
            coeffs(14),
            prop::collection::vec(-50i64..50, 1..4),
        ),
        |(p, k, f, phi)| {
            let (f, phi) = (pp(p, k, &f), pp(p, k, &monic(&phi)));
            let ex = f
                .phi_expansion(&phi)
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            let mut acc = PadicPoly::zero(p, k);
            let mut pw = PadicPoly::one(p, k);
            for a in &ex {
                prop_assert!(a.degree().is_none_or(|d| d < phi.degree().unwrap()));
                acc = acc.add(&a.mul(&pw));
                pw = pw.mul(&phi);
            }
            prop_assert!(acc.eq_mod(&f, k));
            Ok(())
        },
    )
}

fn gauss_v1() -> Result<(), String> {
    run((primes(), coeffs(6), coeffs(6), 0u32..4), |(p, a, b, s)| {
        let k = 60;
        let a = pp(p, k, &a);
        // b has v1 = 0 after making its leading coefficient a unit
        let mut bc = b.clone();
        bc.push(1);
        let b = pp(p, k, &bc);
        let a = a.mul_p_pow(s as i64).truncate(k);
        if let Some(va) = a.v1() {
            prop_assert_eq!(b.v1(), Some(0));
            prop_assert_eq!(a.mul(&b).truncate(k).v1(), Some(va));
        }
        Ok(())
    })
}

fn field_axioms() -> Result<(), String> {
    run(
        (
            prop::sample::select(vec![2u64, 3, 5]),
            2usize..4,
            any::<u64>(),
        ),
        |(p, d, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f0 = FFTowerField::prime(p);
            // an irreducible of degree d over F_p, then one of degree 2 over that
            let psi = irreducible_of_degree(&f0, d, &mut rng);
            let f1 = f0
                .extend(&psi)
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            let psi2 = irreducible_of_degree(&f1, 2, &mut rng);
            let f2 = f1
                .extend(&psi2)
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            for fld in [&f1, &f2] {
                let (a, b, c) = (
                    fld.random(&mut rng),
                    fld.random(&mut rng),
                    fld.random(&mut rng),
                );
                prop_assert_eq!(
                    fld.mul(&a, &fld.add(&b, &c)),
                    fld.add(&fld.mul(&a, &b), &fld.mul(&a, &c))
                );
                prop_assert_eq!(fld.mul(&fld.mul(&a, &b), &c), fld.mul(&a, &fld.mul(&b, &c)));
                prop_assert_eq!(fld.mul(&a, &b), fld.mul(&b, &a));
                if !fld.is_zero(&a) {
                    let inv = fld
                        .inv(&a)
                        .map_err(|e| TestCaseError::fail(e.to_string()))?;
                    prop_assert!(fld.is_one(&fld.mul(&a, &inv)));
                }
            }
            Ok(())
        },
    )
}

fn irreducible_of_degree(fld: &FFTowerField, d: usize, rng: &mut ChaCha8Rng) -> Vec<FFElem> {
    loop {
        let mut g: Vec<FFElem> = (0..d).map(|_| fld.random(rng)).collect();
        g.push(fld.one());
        let fs = fld.factor(&g, rng);
        if fs.len() == 1 && fs[0].1 == 1 && fs[0].0.len() == d + 1 {
            return g;
        }
    }
}

fn ff_factor_multiplies_back() -> Result<(), String> {
    run(
        (
            prop::sample::select(vec![2u64, 3, 5, 7]),
            prop::collection::vec(0u64..7, 1..10),
            any::<u64>(),
        ),
        |(p, c, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let fld = FFTowerField::prime(p);
            let mut g: Vec<FFElem> = c.iter().map(|&x| FFElem::Prime(x % p)).collect();
            g.push(fld.one());
            let fs = fld.factor(&g, &mut rng);
            let mut prod = vec![fld.one()];
            for (h, m) in &fs {
                for _ in 0..*m {
                    prod = fld.poly_mul(&prod, h);
                }
                // irreducible: no root for small degrees, single distinct-degree part otherwise
                if h.len() - 1 <= 3 && h.len() > 2 {
                    prop_assert!(fld
                        .elements()
                        .iter()
                        .all(|x| !fld.is_zero(&fld.poly_eval(h, x))));
                }
                let dd = fld.distinct_degree(h);
                prop_assert!(dd.len() == 1 && dd[0].1 == h.len() - 1);
            }
            prop_assert_eq!(prod, fld.poly_trim(g));
            Ok(())
        },
    )
}

fn points() -> impl Strategy<Value = Vec<PolygonPoint>> {
    prop::collection::vec(prop::option::weighted(0.85, -20i64..40), 1..12).prop_map(|us| {
        us.into_iter()
            .enumerate()
            .map(|(s, u)| match u {
                Some(u) => PolygonPoint::new(s, u),
                None => PolygonPoint::unknown(s, None),
            })
            .collect()
    })
}

fn hull_idempotence() -> Result<(), String> {
    run(points(), |pts| {
        if pts.iter().all(|p| p.u.is_none()) {
            return Ok(());
        }
        let n = lower_hull(&pts).unwrap();
        let again: Vec<PolygonPoint> = n
            .vertices
            .iter()
            .map(|v| PolygonPoint::rational(v.s, v.u))
            .collect();
        let n2 = lower_hull(&again).unwrap();
        prop_assert_eq!(&n.vertices, &n2.vertices);
        prop_assert_eq!(&n.sides, &n2.sides);
        // slopes strictly increase
        for w in n.sides.windows(2) {
            prop_assert!(w[0].slope < w[1].slope);
        }
        Ok(())
    })
}

fn supporting_lines() -> Result<(), String> {
    run((points(), -12i64..12, 1i64..6), |(pts, a, b)| {
        if pts.iter().all(|p| p.u.is_none()) {
            return Ok(());
        }
        let n = lower_hull(&pts).unwrap();
        let lambda = Rational64::new(a, b);
        let c = line_touch_value(&n, lambda);
        for p in &pts {
            if let Some(u) = p.u {
                prop_assert!(u - lambda * Rational64::from_integer(p.s as i64) >= c);
            }
        }
        Ok(())
    })
}

/// Types of the factors of a few family members and random products.
fn type_pool() -> Vec<(ZPoly, MontesFactor)> {
    let mut out = Vec::new();
    let specs = [
        FamilySpec::a(5, 2, 3, 0),
        FamilySpec::a(13, 3, 5, 1),
        FamilySpec::b(7, 2),
        FamilySpec::e(5, 2),
        FamilySpec::e(5, 3),
        FamilySpec::am(7, 2, 3, 2),
        FamilySpec::d(5, 2, 3, 2),
    ];
    for s in specs {
        let s = s.unwrap();
        let f = gen_family(&s).unwrap();
        for m in montes(&f, s.prime(), &MontesConfig::default())
            .unwrap()
            .factors
        {
            out.push((f.clone(), m));
        }
    }
    out
}

fn ord_product_rule() -> Result<(), String> {
    let pool = type_pool();
    let n = pool.len();
    run((0..n, coeffs(8), coeffs(8)), |(i, g, h)| {
        let t = &pool[i].1.ty;
        let k = t.prec();
        let p = t.p();
        let (g, h) = (pp(p, k, &monic(&g)), pp(p, k, &monic(&h)));
        let err = |e: padic_montes::Error| TestCaseError::fail(e.to_string());
        for r in 0..=t.order() {
            let tr = t.truncated(r);
            let og = tr.ord_in_type(&g).map_err(err)?;
            let oh = tr.ord_in_type(&h).map_err(err)?;
            let ogh = tr.ord_in_type(&g.mul(&h)).map_err(err)?;
            prop_assert_eq!(ogh, og + oh, "order {}", r);
        }
        Ok(())
    })
}

/// Irreducible family members (one factor) with their type.
fn irreducible_pool() -> Vec<(ZPoly, OMType)> {
    let specs = [
        FamilySpec::a(5, 2, 3, 0),
        FamilySpec::a(13, 3, 5, 1),
        FamilySpec::e(5, 2),
        FamilySpec::e(5, 3),
        FamilySpec::d(5, 2, 3, 2),
    ];
    specs
        .into_iter()
        .map(|s| {
            let s = s.unwrap();
            let f = gen_family(&s).unwrap();
            let out = montes(&f, s.prime(), &MontesConfig::default()).unwrap();
            assert_eq!(out.factors.len(), 1);
            (f, out.factors[0].ty.clone())
        })
        .collect()
}

fn representative_criterion() -> Result<(), String> {
    let pool = irreducible_pool();
    let levels: Vec<(usize, usize)> = pool
        .iter()
        .enumerate()
        .flat_map(|(j, (_, t))| (1..=t.order()).map(move |i| (j, i)))
        .collect();
    let nl = levels.len();
    run(
        (0..nl, prop::collection::vec(-6i64..6, 0..12), 0u32..8),
        |(li, noise, shift)| {
            let (j, i) = levels[li];
            let (f, t) = &pool[j];
            let p = t.p();
            let phi = t.level(i).phi.to_zpoly();
            let m = t.level(i).m;
            // g = φ_i + p^shift·noise, monic of degree m_i
            let pk = BigInt::from(p).pow(shift);
            let mut c = phi.coeffs().to_vec();
            for (d, x) in noise.iter().enumerate().take(m) {
                c[d] += &pk * x;
            }
            let g = ZPoly::new(c);
            // (a): R_{i−1}(g) ∼ ψ_{i−1}, i.e. ord of g in the type of order i − 1 is 1
            let tr = t.truncated(i - 1);
            let a = tr
                .ord_in_type(&PadicPoly::from_zpoly(&g, p, t.prec()))
                .map_err(|e| TestCaseError::fail(e.to_string()))?
                == 1;
            // (c): v(g(θ)) = v_p(Res(f, g))/deg f above V_i/(e_1⋯e_{i−1})
            let res = resultant_oracle(f.coeffs(), g.coeffs());
            let deg = f.degree().unwrap() as i64;
            let v = Rational64::new(vp(&res, p) as i64, deg);
            let c = v > Rational64::new(t.level(i).v, t.ram(i - 1));
            prop_assert_eq!(a, c, "level {} shift {} v(g(θ)) = {}", i, shift, v);
            Ok(())
        },
    )
}

fn universal_values() -> Result<(), String> {
    let pool = type_pool();
    let n = pool.len();
    run((0..n, -5i64..=5), |(i, k)| {
        let t = &pool[i].1.ty;
        let u = k * t.e() + (k.rem_euclid(3));
        let prec = 80;
        let psi = t.universal_poly(u, prec);
        prop_assert!(psi.degree().is_none_or(|d| d < t.degree()));
        let (jp, _) = t.universal_exponents(u);
        let shift = (-jp).max(0);
        // clear the denominator, measure, account for the shift
        let num = psi.mul_p_pow(shift).normalize();
        let w = t
            .with_prec(prec + shift as u32)
            .w(&num)
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(w, Val::Exact(u + shift * t.e()));
        Ok(())
    })
}

fn montes_separation() -> Result<(), String> {
    run(any::<u64>(), |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, a, b) = random_known_pair(&mut rng);
        let f = a.mul(&b);
        let out = montes(&f, p, &MontesConfig::default())
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(out.total_degree(), f.degree().unwrap());
        prop_assert_eq!(out.factors.len(), 2);
        let fp = PadicPoly::from_zpoly(&f, p, out.prec);
        for (k, mk) in out.factors.iter().enumerate() {
            let err = |e: padic_montes::Error| TestCaseError::fail(e.to_string());
            prop_assert_eq!(mk.ty.ord_in_type(&fp).map_err(err)?, 1);
            for (j, mj) in out.factors.iter().enumerate() {
                if j != k {
                    prop_assert_eq!(mj.ty.ord_in_type(&mk.phi).map_err(err)?, 0);
                }
            }
        }
        Ok(())
    })
}

fn lifting_surrogates() -> Result<(), String> {
    run(any::<u64>(), |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, a, b) = random_known_pair(&mut rng);
        let f = a.mul(&b);
        let out = montes(&f, p, &MontesConfig::default())
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        let opts = LiftOptions {
            measure: true,
            ..Default::default()
        };
        for m in &out.factors {
            let r = sfl_lift_with(&f, &m.ty, &m.phi, 60, &opts, None)
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            // measured slopes; a measurement that stays a lower bound means Φ
            // agrees with F beyond every precision tried, so it cannot refute
            // the doubling and restarts the chain
            let measured: Vec<(i64, bool)> =
                r.records.iter().map(|x| x.measured_h.unwrap()).collect();
            for (j, rec) in r.records.iter().enumerate() {
                // the correction is integral
                prop_assert_eq!(rec.correction_den, 0);
                let (h, exact) = measured[j];
                // each pass at least doubles the guaranteed slope, and the
                // recorded guarantee is never above the true slope
                if j >= 1 && exact {
                    prop_assert!(
                        h >= rec.h,
                        "slopes {:?} below guarantee {}",
                        measured,
                        rec.h
                    );
                }
                if j >= 2 {
                    let (ph, pexact) = measured[j - 2];
                    if let Some(d) = rec.c1_drift.filter(|d| d.is_exact() && pexact) {
                        prop_assert!(d.bound() >= ph, "drift {:?} below {}", d, ph);
                    }
                }
            }
            // the output is irreducible: it singles out its own type once
            let phi = PadicPoly::new(p, m.ty.prec(), r.phi_exact.coeffs().to_vec());
            prop_assert_eq!(
                m.ty.ord_in_type(&phi)
                    .map_err(|e| TestCaseError::fail(e.to_string()))?,
                1
            );
        }
        Ok(())
    })
}

fn product_congruence() -> Result<(), String> {
    run((any::<u64>(), 1u32..120), |(seed, nu)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, a, b) = random_known_pair(&mut rng);
        let f = a.mul(&b);
        let r = factor(
            &f,
            p,
            &FactorConfig {
                nu,
                ..Default::default()
            },
        )
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(r.product_check);
        let phis: Vec<PadicPoly> = r.factors.iter().map(|g| g.phi.clone()).collect();
        prop_assert!(product_matches(&f, &phis, p, nu));
        // the discriminant ledger closes: Δ ≥ 0 and every index is non-negative
        prop_assert!(r.delta >= 0 && r.index_factors >= 0 && r.index_cross >= 0);
        Ok(())
    })
}

fn deterministic_reports() -> Result<(), String> {
    run(any::<u64>(), |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, a, b) = random_known_pair(&mut rng);
        let f = a.mul(&b);
        let cfg = FactorConfig {
            nu: 30,
            seed,
            ..Default::default()
        };
        let one = serde_json::to_string(&factor(&f, p, &cfg).unwrap()).unwrap();
        let two = serde_json::to_string(
            &factor(
                &f,
                p,
                &FactorConfig {
                    parallel: false,
                    ..cfg
                },
            )
            .unwrap(),
        )
        .unwrap();
        prop_assert_eq!(one, two);
        Ok(())
    })
}
