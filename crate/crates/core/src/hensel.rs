//! Classical two-factor quadratic Hensel lifting: the baseline the direct
//! single-factor driver is compared with in benchmarks.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::padic::PadicPoly;
use crate::tower::{FFElem, FFTowerField};
use crate::zpoly::ZPoly;

fn lift_ff(c: &[FFElem], p: u64, prec: u32) -> PadicPoly {
    let v: Vec<BigInt> = c
        .iter()
        .map(|x| BigInt::from(x.prime_value().unwrap_or(0)))
        .collect();
    PadicPoly::new(p, prec, v)
}

/// Lifts the monic factor `hbar` of f̄ (coprime to its cofactor) to H with
/// f ≡ G·H mod p^ν, doubling the precision of both factors and of the Bézout
/// pair at every step.
pub fn hensel_lift(f: &ZPoly, p: u64, hbar: &[u64], nu: u32) -> Result<PadicPoly> {
    if nu == 0 {
        return Err(Error::BadParams("precision must be at least 1".into()));
    }
    if hbar.last() != Some(&1) {
        return Err(Error::NotMonic);
    }
    let fld = FFTowerField::prime(p);
    let fbar: Vec<FFElem> = PadicPoly::from_zpoly(f, p, 1)
        .reduce_mod_p()
        .into_iter()
        .map(FFElem::Prime)
        .collect();
    let hb: Vec<FFElem> = hbar.iter().map(|&c| FFElem::Prime(c % p)).collect();
    let (gb, rem) = fld.poly_divrem(&fbar, &hb);
    if !rem.is_empty() {
        return Err(Error::BadParams(
            "the residual factor does not divide f mod p".into(),
        ));
    }
    let (d, sb, tb) = fld.poly_xgcd(&gb, &hb);
    if d.len() != 1 {
        return Err(Error::SquareFactor);
    }
    // s·g + t·h = d with d a nonzero constant: rescale to 1
    let dinv = fld.inv(&d[0])?;
    let sb = fld.poly_scale(&sb, &dinv);
    let tb = fld.poly_scale(&tb, &dinv);

    let mut k = 1u32;
    let (mut g, mut h) = (lift_ff(&gb, p, 1), lift_ff(&hb, p, 1));
    let (mut s, mut t) = (lift_ff(&sb, p, 1), lift_ff(&tb, p, 1));
    while k < nu {
        let k2 = (2 * k).min(nu);
        let up = |x: &PadicPoly| x.extend_prec(k2);
        let (g0, h0, s0, t0) = (up(&g), up(&h), up(&s), up(&t));
        let e = PadicPoly::from_zpoly(f, p, k2).sub(&g0.mul(&h0));
        let (q, r) = s0.mul(&e).quotrem(&h0)?;
        let g1 = g0.add(&t0.mul(&e)).add(&q.mul(&g0));
        let h1 = h0.add(&r);
        let b = s0.mul(&g1).add(&t0.mul(&h1)).sub(&PadicPoly::one(p, k2));
        let (c, dd) = s0.mul(&b).quotrem(&h1)?;
        s = s0.sub(&dd);
        t = t0.sub(&t0.mul(&b)).sub(&c.mul(&g1));
        g = g1;
        h = h1;
        k = k2;
    }
    Ok(PadicPoly::new(p, nu, h.residues(nu)))
}
