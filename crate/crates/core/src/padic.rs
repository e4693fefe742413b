//! Truncated p-adic integers and dense polynomials over them.
//!
//! Every value carries one explicit precision `prec`: a coefficient is the
//! canonical representative of a class modulo `p^prec`. A polynomial may also
//! carry a denominator exponent `den`, in which case it stands for
//! `coeffs / p^den`; its absolute precision is then `prec - den` digits.
//! Operations take the minimum of their operands' precisions and never grow
//! precision silently; [`PadicPoly::extend_prec`] exists for values that are
//! known to be exact.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::zpoly::ZPoly;

/// Operand length above which polynomial products switch to Karatsuba.
static KARATSUBA_THRESHOLD: AtomicUsize = AtomicUsize::new(32);

/// Sets the Karatsuba switch-over length (0 disables the subquadratic path).
pub fn set_karatsuba_threshold(len: usize) {
    KARATSUBA_THRESHOLD.store(len, Ordering::Relaxed);
}

pub fn karatsuba_threshold() -> usize {
    KARATSUBA_THRESHOLD.load(Ordering::Relaxed)
}

const BARRETT_MIN_BITS: u64 = 1024;

/// `p^k` with a Barrett reciprocal, shared through a per-thread cache.
pub struct Modulus {
    m: BigInt,
    bits: u64,
    shift: usize,
    mu: BigInt,
}

impl Modulus {
    fn new(p: u64, k: u32) -> Self {
        let m = BigInt::from(p).pow(k);
        let bits = m.bits();
        let shift = (2 * bits + 64) as usize;
        let mu = if bits >= BARRETT_MIN_BITS {
            (BigInt::one() << shift) / &m
        } else {
            BigInt::zero()
        };
        Modulus { m, bits, shift, mu }
    }

    pub fn value(&self) -> &BigInt {
        &self.m
    }

    /// Canonical representative of `x` in `[0, m)`.
    pub fn reduce(&self, x: &BigInt) -> BigInt {
        if x.is_negative() {
            let r = self.reduce_nonneg(&-x);
            if r.is_zero() {
                r
            } else {
                &self.m - r
            }
        } else {
            self.reduce_nonneg(x)
        }
    }

    fn reduce_nonneg(&self, x: &BigInt) -> BigInt {
        if x < &self.m {
            return x.clone();
        }
        if self.bits < BARRETT_MIN_BITS || x.bits() as usize >= self.shift {
            return x.mod_floor(&self.m);
        }
        let q = (x * &self.mu) >> self.shift;
        let mut r = x - q * &self.m;
        while r >= self.m {
            r -= &self.m;
        }
        r
    }
}

thread_local! {
    static MODULI: RefCell<HashMap<(u64, u32), Rc<Modulus>>> = RefCell::new(HashMap::new());
}

/// Cached `p^k`.
pub fn modulus(p: u64, k: u32) -> Rc<Modulus> {
    MODULI.with(|c| {
        let mut c = c.borrow_mut();
        if c.len() > 4096 {
            c.clear();
        }
        c.entry((p, k))
            .or_insert_with(|| Rc::new(Modulus::new(p, k)))
            .clone()
    })
}

pub fn p_pow(p: u64, k: u32) -> BigInt {
    modulus(p, k).value().clone()
}

/// `v_p(x)`, capped at `cap`; zero maps to `cap`.
pub fn val_p(x: &BigInt, p: u64, cap: u32) -> u32 {
    if x.is_zero() {
        return cap;
    }
    // strip in word-sized chunks first
    let mut chunk = p;
    let mut per = 1u32;
    while let Some(c) = chunk.checked_mul(p) {
        if c > (1u64 << 62) {
            break;
        }
        chunk = c;
        per += 1;
    }
    let mut v = 0u32;
    let mut y = x.abs();
    let bc = BigInt::from(chunk);
    let bp = BigInt::from(p);
    while v + per <= cap {
        let (q, r) = y.div_rem(&bc);
        if !r.is_zero() {
            break;
        }
        y = q;
        v += per;
    }
    while v < cap {
        let (q, r) = y.div_rem(&bp);
        if !r.is_zero() {
            break;
        }
        y = q;
        v += 1;
    }
    v
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mulm = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powm = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulm(r, b);
            }
            b = mulm(b, b);
            e >>= 1;
        }
        r
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powm(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulm(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// An element of `Z_p` known modulo `p^prec`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PadicElement {
    p: u64,
    prec: u32,
    value: BigInt,
}

impl PadicElement {
    pub fn new(p: u64, prec: u32, value: impl Into<BigInt>) -> Self {
        let value = modulus(p, prec).reduce(&value.into());
        PadicElement { p, prec, value }
    }

    pub fn zero(p: u64, prec: u32) -> Self {
        PadicElement {
            p,
            prec,
            value: BigInt::zero(),
        }
    }

    pub fn one(p: u64, prec: u32) -> Self {
        Self::new(p, prec, 1)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn value(&self) -> &BigInt {
        &self.value
    }

    /// `None` stands for ⊥: the element vanishes at this precision.
    pub fn valuation(&self) -> Option<u32> {
        let v = val_p(&self.value, self.p, self.prec);
        (v < self.prec).then_some(v)
    }

    pub fn add(&self, o: &Self) -> Self {
        let prec = self.prec.min(o.prec);
        Self::new(self.p, prec, &self.value + &o.value)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let prec = self.prec.min(o.prec);
        Self::new(self.p, prec, &self.value - &o.value)
    }

    pub fn neg(&self) -> Self {
        Self::new(self.p, self.prec, -&self.value)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let prec = self.prec.min(o.prec);
        Self::new(self.p, prec, &self.value * &o.value)
    }

    /// Inverse of a unit.
    pub fn inverse(&self) -> Result<Self> {
        let m = modulus(self.p, self.prec);
        let g = self.value.extended_gcd(m.value());
        if !g.gcd.is_one() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::new(self.p, self.prec, g.x))
    }
}

/// A polynomial `coeffs / p^den` with coefficients known modulo `p^prec`,
/// stored constant-first with trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PadicPoly {
    p: u64,
    prec: u32,
    den: u32,
    coeffs: Vec<BigInt>,
}

fn trim(v: &mut Vec<BigInt>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

impl PadicPoly {
    pub fn new(p: u64, prec: u32, coeffs: Vec<BigInt>) -> Self {
        Self::with_den(p, prec, 0, coeffs)
    }

    pub fn with_den(p: u64, prec: u32, den: u32, coeffs: Vec<BigInt>) -> Self {
        let m = modulus(p, prec);
        let mut coeffs: Vec<BigInt> = coeffs.iter().map(|c| m.reduce(c)).collect();
        trim(&mut coeffs);
        PadicPoly {
            p,
            prec,
            den,
            coeffs,
        }
    }

    fn raw(p: u64, prec: u32, den: u32, mut coeffs: Vec<BigInt>) -> Self {
        trim(&mut coeffs);
        PadicPoly {
            p,
            prec,
            den,
            coeffs,
        }
    }

    pub fn from_ints(p: u64, prec: u32, c: &[i64]) -> Self {
        Self::new(p, prec, c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn from_zpoly(f: &ZPoly, p: u64, prec: u32) -> Self {
        Self::new(p, prec, f.coeffs().to_vec())
    }

    pub fn zero(p: u64, prec: u32) -> Self {
        PadicPoly {
            p,
            prec,
            den: 0,
            coeffs: vec![],
        }
    }

    pub fn one(p: u64, prec: u32) -> Self {
        Self::constant(p, prec, BigInt::one())
    }

    pub fn constant(p: u64, prec: u32, c: BigInt) -> Self {
        Self::new(p, prec, vec![c])
    }

    pub fn x(p: u64, prec: u32) -> Self {
        Self::new(p, prec, vec![BigInt::zero(), BigInt::one()])
    }

    /// `c * x^k`.
    pub fn monomial(p: u64, prec: u32, c: BigInt, k: usize) -> Self {
        let mut v = vec![BigInt::zero(); k + 1];
        v[k] = c;
        Self::new(p, prec, v)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn den(&self) -> u32 {
        self.den
    }

    /// Digits known of the represented polynomial (numerator precision minus denominator).
    pub fn abs_prec(&self) -> i64 {
        self.prec as i64 - self.den as i64
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> PadicElement {
        let v = self.coeffs.get(i).cloned().unwrap_or_default();
        PadicElement {
            p: self.p,
            prec: self.prec,
            value: v,
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// ⊥-aware zero test: true when every coefficient vanishes at this precision.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.den == 0 && self.coeffs.last().is_some_and(|c| c.is_one())
    }

    /// Minimum coefficient valuation, minus the denominator; `None` is ⊥.
    pub fn v1(&self) -> Option<i64> {
        let mut best: Option<u32> = None;
        for c in &self.coeffs {
            let cap = best.unwrap_or(self.prec);
            if c.is_zero() {
                continue;
            }
            let v = val_p(c, self.p, cap);
            if v < cap {
                best = Some(v);
                if v == 0 {
                    break;
                }
            }
        }
        best.map(|v| v as i64 - self.den as i64)
    }

    fn num_val(&self) -> u32 {
        match self.v1() {
            Some(v) => (v + self.den as i64) as u32,
            None => self.prec,
        }
    }

    /// Drops digits beyond `prec` (numerator precision).
    pub fn truncate(&self, prec: u32) -> Self {
        if prec >= self.prec {
            return self.clone();
        }
        Self::with_den(self.p, prec, self.den, self.coeffs.clone())
    }

    /// Reinterprets the value at a higher precision, padding with zero digits.
    /// Only meaningful for values that are exact (chosen approximations, exact inputs).
    pub fn extend_prec(&self, prec: u32) -> Self {
        PadicPoly {
            prec: prec.max(self.prec),
            ..self.clone()
        }
    }

    /// Sets the numerator precision to exactly `prec` (truncating or padding).
    pub fn at_prec(&self, prec: u32) -> Self {
        if prec <= self.prec {
            self.truncate(prec)
        } else {
            self.extend_prec(prec)
        }
    }

    /// Strips the largest power of `p` shared by numerator and denominator.
    pub fn normalize(&self) -> Self {
        if self.den == 0 {
            return self.clone();
        }
        if self.coeffs.is_empty() {
            return PadicPoly {
                p: self.p,
                prec: self.prec.saturating_sub(self.den).max(1),
                den: 0,
                coeffs: vec![],
            };
        }
        let k = self.num_val().min(self.den);
        if k == 0 {
            return self.clone();
        }
        let d = p_pow(self.p, k);
        let coeffs = self.coeffs.iter().map(|c| c / &d).collect();
        PadicPoly::raw(self.p, self.prec - k, self.den - k, coeffs)
    }

    /// Multiplies by `p^k` for any integer `k`.
    pub fn mul_p_pow(&self, k: i64) -> Self {
        if k >= 0 {
            let d = p_pow(self.p, k as u32);
            let coeffs = self.coeffs.iter().map(|c| c * &d).collect();
            PadicPoly::raw(self.p, self.prec + k as u32, self.den, coeffs)
        } else {
            PadicPoly {
                den: self.den + (-k) as u32,
                ..self.clone()
            }
        }
    }

    fn aligned(&self, den: u32) -> (u32, Vec<BigInt>) {
        let s = den - self.den;
        if s == 0 {
            return (self.prec, self.coeffs.clone());
        }
        let d = p_pow(self.p, s);
        (self.prec + s, self.coeffs.iter().map(|c| c * &d).collect())
    }

    fn combine(&self, o: &Self, sign: i32) -> Self {
        debug_assert_eq!(self.p, o.p);
        let den = self.den.max(o.den);
        let (pa, a) = self.aligned(den);
        let (pb, b) = o.aligned(den);
        let prec = pa.min(pb);
        let n = a.len().max(b.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let x = a.get(i);
            let y = b.get(i);
            out.push(match (x, y, sign) {
                (Some(x), Some(y), 1) => x + y,
                (Some(x), Some(y), _) => x - y,
                (Some(x), None, _) => x.clone(),
                (None, Some(y), 1) => y.clone(),
                (None, Some(y), _) => -y,
                (None, None, _) => BigInt::zero(),
            });
        }
        Self::with_den(self.p, prec, den, out)
    }

    pub fn add(&self, o: &Self) -> Self {
        self.combine(o, 1)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.combine(o, -1)
    }

    pub fn neg(&self) -> Self {
        Self::with_den(
            self.p,
            self.prec,
            self.den,
            self.coeffs.iter().map(|c| -c).collect(),
        )
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::with_den(
            self.p,
            self.prec,
            self.den,
            self.coeffs.iter().map(|x| x * c).collect(),
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.p, o.p);
        let va = self.num_val();
        let vb = o.num_val();
        let prec = (self.prec + vb).min(o.prec + va);
        let den = self.den + o.den;
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return PadicPoly {
                p: self.p,
                prec,
                den,
                coeffs: vec![],
            };
        }
        let prod = int_poly_mul(&self.coeffs, &o.coeffs);
        Self::with_den(self.p, prec, den, prod)
    }

    /// Quotient and remainder by a monic divisor.
    pub fn quotrem(&self, g: &Self) -> Result<(Self, Self)> {
        if !g.is_monic() {
            return Err(Error::NonMonicDivisor);
        }
        let prec = self.prec.min(g.prec);
        let m = modulus(self.p, prec);
        let dg = g.coeffs.len() - 1;
        if self.coeffs.len() <= dg {
            return Ok((
                PadicPoly {
                    p: self.p,
                    prec,
                    den: self.den,
                    coeffs: vec![],
                },
                self.truncate(prec),
            ));
        }
        let mut r = self.coeffs.clone();
        let nq = r.len() - dg;
        let mut q = vec![BigInt::zero(); nq];
        for i in (dg..r.len()).rev() {
            let c = m.reduce(&r[i]);
            if !c.is_zero() {
                for (j, gj) in g.coeffs[..dg].iter().enumerate() {
                    if !gj.is_zero() {
                        r[i - dg + j] -= &c * gj;
                    }
                }
            }
            q[i - dg] = c;
            r[i] = BigInt::zero();
        }
        r.truncate(dg);
        let r: Vec<BigInt> = r.iter().map(|c| m.reduce(c)).collect();
        Ok((
            PadicPoly::raw(self.p, prec, self.den, q),
            PadicPoly::raw(self.p, prec, self.den, r),
        ))
    }

    pub fn rem(&self, g: &Self) -> Result<Self> {
        if self.coeffs.len() < g.coeffs.len() && g.is_monic() {
            return Ok(self.truncate(self.prec.min(g.prec)));
        }
        Ok(self.quotrem(g)?.1)
    }

    /// `self * o mod g`.
    pub fn mulmod(&self, o: &Self, g: &Self) -> Result<Self> {
        self.mul(o).rem(g)
    }

    /// `[a_0, a_1, …]` with `self = Σ a_s φ^s` and `deg a_s < deg φ`.
    pub fn phi_expansion(&self, phi: &Self) -> Result<Vec<Self>> {
        if !phi.is_monic() {
            return Err(Error::NonMonicDivisor);
        }
        let dphi = phi.coeffs.len() - 1;
        let mut out = Vec::new();
        let mut cur = self.truncate(self.prec.min(phi.prec));
        if dphi == 1 && phi.coeffs[0].is_zero() {
            // φ = x: the expansion is the coefficient list
            for c in &cur.coeffs {
                out.push(PadicPoly::raw(self.p, cur.prec, cur.den, vec![c.clone()]));
            }
            if out.is_empty() {
                out.push(cur);
            }
            return Ok(out);
        }
        loop {
            if cur.coeffs.len() <= dphi {
                out.push(cur);
                break;
            }
            let (q, r) = cur.quotrem(phi)?;
            out.push(r);
            cur = q;
        }
        Ok(out)
    }

    /// Coefficients reduced modulo `p` (the polynomial must be integral, `den = 0`).
    pub fn reduce_mod_p(&self) -> Vec<u64> {
        debug_assert_eq!(self.den, 0);
        let p = BigInt::from(self.p);
        let mut v: Vec<u64> = self
            .coeffs
            .iter()
            .map(|c| c.mod_floor(&p).to_u64().unwrap())
            .collect();
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    }

    /// Canonical integer numerators.
    pub fn to_zpoly(&self) -> ZPoly {
        ZPoly::new(self.coeffs.clone())
    }

    /// Canonical representatives modulo `p^digits` of an integral polynomial.
    pub fn residues(&self, digits: u32) -> Vec<BigInt> {
        let n = self.normalize();
        let m = modulus(self.p, digits);
        let mut v: Vec<BigInt> = if n.den == 0 {
            n.coeffs.iter().map(|c| m.reduce(c)).collect()
        } else {
            // non-integral values have no canonical residue; keep numerators
            n.coeffs.clone()
        };
        trim(&mut v);
        v
    }

    /// True when `self ≡ o (mod p^digits)` for integral polynomials.
    pub fn eq_mod(&self, o: &Self, digits: u32) -> bool {
        self.residues(digits) == o.residues(digits)
    }
}

impl fmt::Display for PadicPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        if s.is_empty() {
            write!(f, "0")?;
        } else {
            write!(f, "{}", s.join(","))?;
        }
        if self.den > 0 {
            write!(f, " /{}^{}", self.p, self.den)?;
        }
        Ok(())
    }
}

/// Exact product of integer coefficient vectors.
pub fn int_poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let t = karatsuba_threshold();
    if t > 0 && a.len() >= t && b.len() >= t {
        return karatsuba(a, b, t);
    }
    schoolbook(a, b)
}

fn schoolbook(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn add_into(dst: &mut [BigInt], src: &[BigInt]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}

fn karatsuba(a: &[BigInt], b: &[BigInt], t: usize) -> Vec<BigInt> {
    if a.len() < t || b.len() < t {
        return schoolbook(a, b);
    }
    let n = a.len().max(b.len());
    let h = n / 2;
    let split = |v: &[BigInt]| -> (Vec<BigInt>, Vec<BigInt>) {
        if v.len() <= h {
            (v.to_vec(), vec![])
        } else {
            (v[..h].to_vec(), v[h..].to_vec())
        }
    };
    let (a0, a1) = split(a);
    let (b0, b1) = split(b);
    let z0 = int_poly_mul(&a0, &b0);
    let z2 = int_poly_mul(&a1, &b1);
    let sum = |x: &[BigInt], y: &[BigInt]| -> Vec<BigInt> {
        let mut s = vec![BigInt::zero(); x.len().max(y.len())];
        add_into(&mut s, x);
        add_into(&mut s, y);
        s
    };
    let mut z1 = int_poly_mul(&sum(&a0, &a1), &sum(&b0, &b1));
    for (i, c) in z0.iter().enumerate() {
        z1[i] -= c;
    }
    for (i, c) in z2.iter().enumerate() {
        z1[i] -= c;
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    add_into(&mut out, &z0);
    add_into(&mut out[h..], &z1);
    if !z2.is_empty() {
        add_into(&mut out[2 * h..], &z2);
    }
    out
}
