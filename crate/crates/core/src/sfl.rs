//! Single-factor lifting: quadratic improvement of a Montes approximation by
//! doubling the slope h_Φ of the length-one principal polygon on each pass.
//!
//! Three drivers share one core:
//! * [`sfl_lift`] warms up the inverse of `A_1` with Newton steps until it is
//!   accurate to `h_φ` and then enters the main loop at `h = 2h_φ`;
//! * [`sfl_lift_short`] skips the warmup and enters the main loop at `h = 2`;
//! * [`direct_sfl`] specializes the loop to order-0 types (a simple factor of
//!   `f mod p`), where no type machinery is needed.
//!
//! Every polynomial `B` carried through the loop is `b / p^d` with `b` integral
//! and `d ≤ exp(F)`; numerators are kept to the precision given by
//! [`precision_schedule`].

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariants::{exponent_of, nu0_of};
use crate::montes::approximation_slope;
use crate::omtype::{OMType, Val};
use crate::padic::{modulus, PadicPoly};
use crate::tower::{FFElem, FFTowerField};
use crate::zpoly::ZPoly;

/// Which lifting driver to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
pub enum Variant {
    /// Newton warmup of the inverse, main loop from `h = 2h_φ`.
    #[default]
    Warmup,
    /// No warmup, main loop from `h = 2`.
    Short,
}

/// Numerator precision policy for the main loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PrecisionMode {
    /// Exactly [`precision_schedule`], retrying with extra digits if a
    /// correction comes out short.
    Production,
    /// Exactly the schedule plus a fixed (possibly negative) offset; a short
    /// correction is reported as [`Error::PrecisionExhausted`].
    Fixed(i64),
}

#[derive(Clone, Debug)]
pub struct LiftOptions {
    pub variant: Variant,
    pub precision: PrecisionMode,
    /// Re-measure the true slope h_Φ (and the drift of the `c_1` coefficient)
    /// at high precision after each correction. Expensive; for tests and benches.
    pub measure: bool,
}

impl Default for LiftOptions {
    fn default() -> Self {
        LiftOptions {
            variant: Variant::Warmup,
            precision: PrecisionMode::Production,
            measure: false,
        }
    }
}

/// One pass of the main loop (iteration 0 is the initial correction).
#[derive(Clone, Debug, Serialize)]
pub struct IterRecord {
    pub iter: usize,
    /// Guaranteed lower bound for h_Φ after this pass.
    pub h: i64,
    /// Numerator precision used in this pass.
    pub work_prec: u32,
    pub elapsed: Duration,
    /// Measured slope of the new Φ and whether it is exact (only with `measure`).
    pub measured_h: Option<(i64, bool)>,
    /// w(c_1 − c_1^{prev}) − w(a_1): at least the previous slope (only with `measure`).
    pub c1_drift: Option<Val>,
    /// Denominator exponent of the correction polynomial after normalization.
    pub correction_den: u32,
}

/// Everything a lift produced.
#[derive(Clone, Debug)]
pub struct LiftOutcome {
    /// Φ reduced modulo p^ν.
    pub phi: PadicPoly,
    /// The full approximation before the final reduction.
    pub phi_exact: ZPoly,
    pub records: Vec<IterRecord>,
    pub quotrems: usize,
    /// Final guaranteed lower bound for h_Φ.
    pub h: i64,
    /// Slope of the input approximation (only computed by the warmup driver).
    pub h_phi: Option<i64>,
}

/// ⌈(2h + V)/e⌉ + 4·exp(F): numerator digits sufficient for one main-loop pass.
pub fn precision_schedule(h: i64, big_v: i64, e: i64, exp: i64) -> u32 {
    (num_integer::Integer::div_ceil(&(2 * h + big_v), &e) + 4 * exp) as u32
}

/// x·(2 − c_1·x) mod Φ, normalized.
pub fn newton_inverse_step(
    x: &PadicPoly,
    c1: &PadicPoly,
    modulus_phi: &PadicPoly,
) -> Result<PadicPoly> {
    let prec = x.prec().min(c1.prec());
    let two = PadicPoly::constant(x.p(), prec + x.den() + c1.den(), BigInt::from(2));
    let t = two.sub(&c1.mulmod(x, modulus_phi)?.normalize());
    Ok(x.mulmod(&t, modulus_phi)?.normalize())
}

/// A lift x_0 of the inverse of A_1(α) in the residue field: w((x_0·A_1 mod φ) − 1) > 0.
pub fn initial_inverse(t: &OMType, phi: &PadicPoly, a1: &PadicPoly) -> Result<PadicPoly> {
    let top = t.order() + 1;
    match t.w(a1)? {
        Val::Exact(0) => {}
        _ => return Err(Error::NotAUnit),
    }
    let xi = t.residue(top, a1)?.ok_or(Error::NotAUnit)?;
    let field = t.top_field();
    // construct builds at a higher value and divides by p^μ: strip the
    // common power so truncating the numerator keeps every known digit
    let x0 = t.construct(top, 0, &field.inv(&xi)?)?.normalize();
    debug_assert!({
        let one = PadicPoly::one(t.p(), t.prec());
        let d = x0.mulmod(a1, phi)?.normalize().sub(&one);
        d.is_zero() || t.w(&d)?.bound() > 0
    });
    Ok(x0)
}

fn mod_p_pow(c: &[BigInt], p: u64, digits: u32) -> Vec<BigInt> {
    let m = modulus(p, digits);
    c.iter().map(|x| m.reduce(x)).collect()
}

/// Φ + C with C's coefficients taken modulo p^D and the sum reduced there too.
fn apply_correction(phi: &[BigInt], corr: &PadicPoly, p: u64, digits: u32) -> Result<Vec<BigInt>> {
    let corr = corr.normalize();
    if corr.den() != 0 || corr.abs_prec() < digits as i64 {
        return Err(Error::PrecisionExhausted(corr.prec()));
    }
    let mut out = phi.to_vec();
    for (i, c) in corr.coeffs().iter().enumerate() {
        out[i] += c;
    }
    let lead = out.len() - 1;
    let mut r = mod_p_pow(&out[..lead], p, digits);
    r.push(BigInt::one());
    Ok(r)
}

/// Type-level constants of one lift.
struct Ledger {
    big_v: i64,
    e: i64,
    exp: i64,
    /// e·(ν − ν₀), an integer because e₁⋯e_i divides e.
    target: i64,
}

impl Ledger {
    fn new(t: &OMType, nu: u32) -> Self {
        let e = t.e();
        let target =
            Rational64::from_integer(e) * (Rational64::from_integer(nu as i64) - nu0_of(t));
        debug_assert!(target.is_integer());
        Ledger {
            big_v: t.big_v(t.order() + 1),
            e,
            exp: exponent_of(t),
            target: target.ceil().to_integer(),
        }
    }

    fn digits(&self, h: i64) -> u32 {
        num_integer::Integer::div_ceil(&(2 * h + self.big_v), &self.e) as u32
    }

    fn work(&self, h: i64, offset: i64) -> u32 {
        (precision_schedule(h, self.big_v, self.e, self.exp) as i64 + offset).max(1) as u32
    }
}

struct Setup {
    a0: PadicPoly,
    a1: PadicPoly,
    w1: i64,
    w0: Val,
}

/// φ-expansion head of f and its values, raising the precision until w(a_1)
/// (and w(a_0) when asked) is exact or a_0 is already below the target.
fn setup(
    t: &OMType,
    f: &ZPoly,
    phi: &[BigInt],
    start: u32,
    want_w0: Option<i64>,
) -> Result<(Setup, u32, usize)> {
    let p = t.p();
    let mut prec = start.max(4);
    let mut quotrems = 0;
    for _ in 0..24 {
        let tp = t.with_prec(prec);
        let fp = PadicPoly::from_zpoly(f, p, prec);
        let ph = PadicPoly::new(p, prec, phi.to_vec());
        let (q, a0) = fp.quotrem(&ph)?;
        let a1 = q.rem(&ph)?;
        quotrems += 1;
        if let Val::Exact(w1) = tp.w(&a1)? {
            match want_w0 {
                None => {
                    return Ok((
                        Setup {
                            a0,
                            a1,
                            w1,
                            w0: Val::AtLeast(0),
                        },
                        prec,
                        quotrems,
                    ))
                }
                Some(enough) => {
                    let w0 = tp.w(&a0)?;
                    if w0.is_exact() || w0.bound() >= enough + w1 {
                        return Ok((Setup { a0, a1, w1, w0 }, prec, quotrems));
                    }
                }
            }
        }
        prec *= 2;
    }
    Err(Error::PrecisionExhausted(prec))
}

/// (a_0, a_1): remainder of f by φ and of the quotient by φ, at `prec` digits.
fn expansion_head(f: &ZPoly, p: u64, phi: &[BigInt], prec: u32) -> Result<(PadicPoly, PadicPoly)> {
    let ph = PadicPoly::new(p, prec, phi.to_vec());
    let (q, a0) = PadicPoly::from_zpoly(f, p, prec).quotrem(&ph)?;
    Ok((a0, q.rem(&ph)?))
}

fn run_lift(
    f: &ZPoly,
    t: &OMType,
    phi: &PadicPoly,
    nu: u32,
    opts: &LiftOptions,
    offset: i64,
    mut hook: Option<&mut dyn FnMut(&IterRecord)>,
) -> Result<LiftOutcome> {
    if nu == 0 {
        return Err(Error::BadParams("precision must be at least 1".into()));
    }
    if !phi.is_monic() || phi.degree() != Some(t.degree()) {
        return Err(Error::NotARepresentative);
    }
    let p = t.p();
    let led = Ledger::new(t, nu);
    let started = Instant::now();
    let mut records = Vec::new();
    let mut cur: Vec<BigInt> = phi.coeffs().to_vec();
    let finish = |cur: &[BigInt], records, quotrems, h, h_phi| {
        let phi_exact = ZPoly::new(cur.to_vec());
        Ok(LiftOutcome {
            phi: PadicPoly::new(p, nu, cur.to_vec()),
            phi_exact,
            records,
            quotrems,
            h,
            h_phi,
        })
    };

    // slope of the input approximation, needed only by the warmup driver
    let want_w0 = match opts.variant {
        Variant::Warmup => Some(led.target + led.big_v),
        Variant::Short => None,
    };
    let (s, prec, mut quotrems) = setup(t, f, &cur, led.work(1, offset), want_w0)?;
    let (h0, h_phi) = match opts.variant {
        Variant::Short => (1, None),
        Variant::Warmup => match s.w0 {
            Val::Exact(w0) => {
                let hp = w0 - s.w1 - led.big_v;
                if hp <= 0 {
                    return Err(Error::NotARepresentative);
                }
                (hp, Some(hp))
            }
            Val::AtLeast(b) => (b - s.w1 - led.big_v, None),
        },
    };
    if h0 >= led.target && opts.variant == Variant::Warmup {
        return finish(&cur, records, quotrems, h0, h_phi);
    }

    // universal polynomial Ψ with w(Ψ) = −w(a_1); its numerator is exact
    let final_h = {
        let mut h = 2 * h0;
        while h < led.target {
            h *= 2;
        }
        h
    };
    let (jp, _) = t.universal_exponents(-s.w1);
    let dpsi = (-jp).max(0) as u32;
    let psi = t.universal_poly(-s.w1, led.work(final_h, offset.max(0)) + dpsi);
    debug_assert_eq!(psi.den(), dpsi);

    // first correction, at the precision the slope h0 asks for
    let work0 = led.work(h0, offset);
    let (a0, a1) = if prec < work0 + dpsi {
        let fp = PadicPoly::from_zpoly(f, p, work0 + dpsi);
        let ph = PadicPoly::new(p, work0 + dpsi, cur.clone());
        let (q, a0) = fp.quotrem(&ph)?;
        quotrems += 1;
        (a0, q.rem(&ph)?)
    } else {
        (s.a0.truncate(work0 + dpsi), s.a1.truncate(work0 + dpsi))
    };
    let ph = PadicPoly::new(p, work0 + dpsi, cur.clone());
    let big_a0 = psi
        .truncate(work0 + dpsi)
        .mulmod(&a0, &ph)?
        .normalize()
        .truncate(work0);
    let big_a1 = psi
        .truncate(work0 + dpsi)
        .mulmod(&a1, &ph)?
        .normalize()
        .truncate(work0);
    let tw = t.with_prec(work0.max(t.prec()));
    let mut x = initial_inverse(&tw, &ph, &big_a1)?.at_prec(work0);
    // w-accuracy of x as an inverse of the current linear coefficient
    let mut acc = 1;
    if opts.variant == Variant::Warmup {
        while acc < h0 {
            x = newton_inverse_step(&x, &big_a1, &ph)?.at_prec(work0);
            acc *= 2;
        }
    }
    let corr = big_a0.mulmod(&x, &ph)?.normalize();
    let corr_den = corr.den();
    cur = apply_correction(&cur, &corr, p, led.digits(h0))?;
    let mut h = 2 * h0;
    let mut meas = Measure::new(opts.measure, phi.coeffs().to_vec(), s.w1);
    let rec = IterRecord {
        iter: 0,
        h,
        work_prec: work0,
        elapsed: started.elapsed(),
        measured_h: meas.slope(t, f, &cur, h, &led)?,
        c1_drift: None,
        correction_den: corr_den,
    };
    if let Some(hk) = hook.as_mut() {
        hk(&rec);
    }
    records.push(rec);

    // main loop
    let mut iter = 0;
    let mut prev_h = h0;
    while h < led.target {
        iter += 1;
        let mut work = led.work(h, offset);
        let (mut c0, mut c1) = expansion_head(f, p, &cur, work + dpsi)?;
        quotrems += 1;
        if opts.variant == Variant::Warmup {
            // the pass may have gained more than it promised; continue from
            // the slope actually reached
            if let Val::Exact(w0) = t.with_prec(work + dpsi).w(&c0)? {
                let reached = w0 - s.w1 - led.big_v;
                if reached > h {
                    h = reached;
                    if h >= led.target {
                        break;
                    }
                    let need = led.work(h, offset);
                    if need > work {
                        work = need;
                        (c0, c1) = expansion_head(f, p, &cur, work + dpsi)?;
                        quotrems += 1;
                    }
                }
            }
        }
        let q = work + dpsi;
        let ph = PadicPoly::new(p, q, cur.clone());
        let psi_q = psi.truncate(q);
        let big_c0 = psi_q.mulmod(&c0, &ph)?.normalize().truncate(work);
        let big_c1 = psi_q.mulmod(&c1, &ph)?.normalize().truncate(work);
        // the linear coefficient moved by w ≥ the previous slope
        acc = acc.min(prev_h);
        loop {
            x = newton_inverse_step(&x.at_prec(work), &big_c1, &ph)?.at_prec(work);
            acc *= 2;
            if acc >= h {
                break;
            }
        }
        let corr = big_c0.mulmod(&x, &ph)?.normalize();
        let corr_den = corr.den();
        let drift = meas.drift(t, f, &cur, h, &led)?;
        cur = apply_correction(&cur, &corr, p, led.digits(h))?;
        prev_h = h;
        h *= 2;
        let rec = IterRecord {
            iter,
            h,
            work_prec: work,
            elapsed: started.elapsed(),
            measured_h: meas.slope(t, f, &cur, h, &led)?,
            c1_drift: drift,
            correction_den: corr_den,
        };
        if let Some(hk) = hook.as_mut() {
            hk(&rec);
        }
        records.push(rec);
    }
    finish(&cur, records, quotrems, h, h_phi)
}

/// High-precision re-measurements for the instrumented runs.
struct Measure {
    on: bool,
    /// The approximation before the latest correction.
    prev: Vec<BigInt>,
    w1: i64,
}

impl Measure {
    fn new(on: bool, phi: Vec<BigInt>, w1: i64) -> Self {
        Measure { on, prev: phi, w1 }
    }

    fn prec_for(&self, h: i64, led: &Ledger) -> u32 {
        (num_integer::Integer::div_ceil(&(self.w1.abs() + led.big_v + 4 * h), &led.e)
            + 4 * led.exp
            + 8) as u32
    }

    fn slope(
        &self,
        t: &OMType,
        f: &ZPoly,
        cur: &[BigInt],
        h: i64,
        led: &Ledger,
    ) -> Result<Option<(i64, bool)>> {
        if !self.on {
            return Ok(None);
        }
        // a_0 may vanish at the first precision when Φ happens to be very
        // close to F; a few doublings usually make the slope exact
        let mut prec = self.prec_for(h, led);
        let mut last = (0, false);
        for _ in 0..4 {
            let tp = t.with_prec(prec);
            let ph = PadicPoly::new(t.p(), prec, cur.to_vec());
            last = approximation_slope(&tp, &ph, &PadicPoly::from_zpoly(f, t.p(), prec))?;
            if last.1 {
                break;
            }
            prec *= 2;
        }
        Ok(Some(last))
    }

    /// w(c_1 − a_1) − w(a_1), where a_1, c_1 are the linear coefficients of f
    /// along the previous and the current approximation.
    fn drift(
        &mut self,
        t: &OMType,
        f: &ZPoly,
        cur: &[BigInt],
        h: i64,
        led: &Ledger,
    ) -> Result<Option<Val>> {
        if !self.on {
            return Ok(None);
        }
        let prec = self.prec_for(h, led);
        let tp = t.with_prec(prec);
        let fp = PadicPoly::from_zpoly(f, t.p(), prec);
        let lin = |c: &[BigInt]| -> Result<PadicPoly> {
            let ph = PadicPoly::new(t.p(), prec, c.to_vec());
            fp.quotrem(&ph)?.0.rem(&ph)
        };
        let d = lin(cur)?.sub(&lin(&self.prev)?);
        let v = if d.is_zero() {
            Val::AtLeast(d.abs_prec() * t.e())
        } else {
            tp.w(&d)?
        };
        self.prev = cur.to_vec();
        Ok(Some(v.affine(1, -self.w1)))
    }
}

/// Lifts the Montes approximation `phi` of the factor F singled out by `t` to
/// Φ ≡ F (mod p^ν), with the warmup driver and production precision.
pub fn sfl_lift(f: &ZPoly, t: &OMType, phi: &PadicPoly, nu: u32) -> Result<PadicPoly> {
    Ok(sfl_lift_with(f, t, phi, nu, &LiftOptions::default(), None)?.phi)
}

/// As [`sfl_lift`] without the Newton warmup.
pub fn sfl_lift_short(f: &ZPoly, t: &OMType, phi: &PadicPoly, nu: u32) -> Result<PadicPoly> {
    let opts = LiftOptions {
        variant: Variant::Short,
        ..Default::default()
    };
    Ok(sfl_lift_with(f, t, phi, nu, &opts, None)?.phi)
}

/// The general entry point; `hook` sees every pass as it completes.
pub fn sfl_lift_with(
    f: &ZPoly,
    t: &OMType,
    phi: &PadicPoly,
    nu: u32,
    opts: &LiftOptions,
    mut hook: Option<&mut dyn FnMut(&IterRecord)>,
) -> Result<LiftOutcome> {
    match opts.precision {
        PrecisionMode::Fixed(off) => run_lift(f, t, phi, nu, opts, off, hook),
        PrecisionMode::Production => {
            let step = 2 * exponent_of(t) + 2;
            let mut last = Error::PrecisionExhausted(0);
            for k in 0..4 {
                let hk: Option<&mut dyn FnMut(&IterRecord)> = match hook.as_mut() {
                    Some(h) => Some(&mut **h),
                    None => None,
                };
                match run_lift(f, t, phi, nu, opts, k * step, hk) {
                    Err(Error::PrecisionExhausted(pr)) => last = Error::PrecisionExhausted(pr),
                    other => return other,
                }
            }
            Err(last)
        }
    }
}

/// Lifts the factor of f whose reduction is the simple irreducible factor
/// `phibar` of f̄ (coefficients constant-first, monic) to Φ dividing f mod p^ν.
pub fn direct_sfl(f: &ZPoly, p: u64, phibar: &[u64], nu: u32) -> Result<PadicPoly> {
    if nu == 0 {
        return Err(Error::BadParams("precision must be at least 1".into()));
    }
    if phibar.last() != Some(&1) || phibar.len() < 2 {
        return Err(Error::NotMonic);
    }
    let fld = FFTowerField::prime(p);
    let fbar: Vec<FFElem> = PadicPoly::from_zpoly(f, p, 1)
        .reduce_mod_p()
        .into_iter()
        .map(FFElem::Prime)
        .collect();
    let pb: Vec<FFElem> = phibar.iter().map(|&c| FFElem::Prime(c % p)).collect();
    match fld.poly_ord(&fbar, &pb) {
        0 => {
            return Err(Error::BadParams(
                "the residual factor does not divide f mod p".into(),
            ))
        }
        1 => {}
        _ => return Err(Error::SquareFactor),
    }
    let mut cur: Vec<BigInt> = phibar.iter().map(|&c| BigInt::from(c)).collect();

    // (1)–(2): slope seed from the φ-expansion at full precision
    let fp = PadicPoly::from_zpoly(f, p, nu);
    let ph = PadicPoly::new(p, nu, cur.clone());
    let (q, a0) = fp.quotrem(&ph)?;
    let a1 = q.rem(&ph)?;
    let Some(h_phi) = a0.v1() else {
        return Ok(ph);
    };
    // (3): inverse of ā_1 modulo φ̄ over F_p
    let a1bar: Vec<FFElem> = a1.reduce_mod_p().into_iter().map(FFElem::Prime).collect();
    let (g, s, _) = fld.poly_xgcd(&a1bar, &pb);
    if g.len() != 1 {
        return Err(Error::NotAUnit);
    }
    let ginv = fld.inv(&g[0])?;
    let s: Vec<BigInt> = fld
        .poly_scale(&s, &ginv)
        .iter()
        .map(|c| BigInt::from(c.prime_value().unwrap()))
        .collect();
    let cap = |d: i64| d.min(nu as i64).max(1) as u32;

    // (4): Newton warmup, the i-th step at 2^i digits
    let mut inv = PadicPoly::new(p, 1, s);
    let mut acc = 1i64;
    while acc < h_phi {
        acc *= 2;
        let pr = cap(acc);
        let ph = PadicPoly::new(p, pr, cur.clone());
        inv = newton_inverse_step(&inv.extend_prec(pr), &a1.truncate(pr), &ph)?;
    }
    // (5): first correction
    let pr = cap(2 * h_phi);
    let ph = PadicPoly::new(p, pr, cur.clone());
    let corr = a0
        .truncate(pr)
        .mulmod(&inv.extend_prec(pr).truncate(pr), &ph)?;
    cur = apply_correction(&cur, &corr, p, pr)?;
    let mut h = 2 * h_phi;
    // (6): ⌈log₂(ν/h_φ)⌉ − 1 further passes
    while h < nu as i64 {
        let pr = cap(2 * h);
        let ph = PadicPoly::new(p, pr, cur.clone());
        let (q, a0) = PadicPoly::from_zpoly(f, p, pr).quotrem(&ph)?;
        let a1 = q.rem(&ph)?;
        inv = newton_inverse_step(&inv.extend_prec(pr).truncate(pr), &a1, &ph)?;
        let corr = a0.mulmod(&inv, &ph)?;
        cur = apply_correction(&cur, &corr, p, pr)?;
        h *= 2;
    }
    Ok(PadicPoly::new(p, nu, cur))
}
