//! The residue field tower `F_0 = F_p ⊆ F_1 ⊆ …` with `F_{i+1} = F_i[y]/(ψ_i)`,
//! kept recursive, plus polynomial factorization over every level.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// An element of some tower level: a prime-field digit, or a coefficient
/// vector over the previous level (length = degree of that level's modulus).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum FFElem {
    Prime(u64),
    Ext(Vec<FFElem>),
}

/// Polynomials over a tower level, constant-first, trimmed.
pub type FFPoly = Vec<FFElem>;

#[derive(Debug)]
pub struct FFTowerField {
    p: u64,
    level: usize,
    base: Option<Arc<FFTowerField>>,
    modulus: FFPoly,
    degree: usize,
    abs_degree: usize,
    order: BigUint,
}

pub type Field = Arc<FFTowerField>;

impl FFTowerField {
    pub fn prime(p: u64) -> Field {
        Arc::new(FFTowerField {
            p,
            level: 0,
            base: None,
            modulus: vec![],
            degree: 1,
            abs_degree: 1,
            order: BigUint::from(p),
        })
    }

    /// `self[y]/(psi)`; fails unless `psi` is monic irreducible over `self`.
    pub fn extend(self: &Arc<Self>, psi: &[FFElem]) -> Result<Field> {
        let psi = self.poly_trim(psi.to_vec());
        if psi.len() < 2 || !self.is_one(psi.last().unwrap()) {
            return Err(Error::ReducibleModulus);
        }
        if !self.is_irreducible(&psi) {
            return Err(Error::ReducibleModulus);
        }
        Ok(self.extend_unchecked(psi))
    }

    pub(crate) fn extend_unchecked(self: &Arc<Self>, psi: FFPoly) -> Field {
        let degree = psi.len() - 1;
        let abs_degree = self.abs_degree * degree;
        Arc::new(FFTowerField {
            p: self.p,
            level: self.level + 1,
            base: Some(self.clone()),
            modulus: psi,
            degree,
            abs_degree,
            order: BigUint::from(self.p).pow(abs_degree as u32),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn base(&self) -> Option<&Field> {
        self.base.as_ref()
    }

    /// The defining polynomial over the base level (empty for `F_p`).
    pub fn modulus(&self) -> &FFPoly {
        &self.modulus
    }

    /// Degree over the base level.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Degree over `F_p`.
    pub fn abs_degree(&self) -> usize {
        self.abs_degree
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    fn b(&self) -> &FFTowerField {
        self.base.as_ref().expect("extension level")
    }

    pub fn zero(&self) -> FFElem {
        if self.level == 0 {
            FFElem::Prime(0)
        } else {
            FFElem::Ext(vec![self.b().zero(); self.degree])
        }
    }

    pub fn one(&self) -> FFElem {
        self.from_u64(1)
    }

    pub fn from_u64(&self, n: u64) -> FFElem {
        if self.level == 0 {
            FFElem::Prime(n % self.p)
        } else {
            self.embed_base(&self.b().from_u64(n))
        }
    }

    /// Image of a base-level element.
    pub fn embed_base(&self, x: &FFElem) -> FFElem {
        let mut v = vec![self.b().zero(); self.degree];
        v[0] = x.clone();
        FFElem::Ext(v)
    }

    /// Image of an element of level `from ≤ self.level`.
    pub fn embed_from(&self, from: usize, x: &FFElem) -> FFElem {
        if from == self.level {
            return x.clone();
        }
        self.embed_base(&self.b().embed_from(from, x))
    }

    /// The generator `z` (class of `y`); for `F_p` this is 1.
    pub fn gen(&self) -> FFElem {
        if self.level == 0 {
            return self.one();
        }
        if self.degree == 1 {
            // y ≡ -c_0
            return FFElem::Ext(vec![self.b().neg(&self.modulus[0])]);
        }
        let mut v = vec![self.b().zero(); self.degree];
        v[1] = self.b().one();
        FFElem::Ext(v)
    }

    /// Element with the given coordinates over the base level.
    pub fn from_coords(&self, mut c: Vec<FFElem>) -> FFElem {
        if self.level == 0 {
            return c.pop().unwrap_or(FFElem::Prime(0));
        }
        let c = self.b().poly_rem(&self.b().poly_trim(c), &self.modulus);
        let mut v = c;
        v.resize(self.degree, self.b().zero());
        FFElem::Ext(v)
    }

    /// Coordinates over the base level.
    pub fn coords(&self, x: &FFElem) -> Vec<FFElem> {
        match x {
            FFElem::Prime(_) => vec![x.clone()],
            FFElem::Ext(v) => v.clone(),
        }
    }

    /// Absolute coordinates over `F_p`.
    pub fn flatten(&self, x: &FFElem) -> Vec<u64> {
        match x {
            FFElem::Prime(v) => vec![*v],
            FFElem::Ext(v) => v.iter().flat_map(|c| self.b().flatten(c)).collect(),
        }
    }

    pub fn is_zero(&self, x: &FFElem) -> bool {
        match x {
            FFElem::Prime(v) => *v == 0,
            FFElem::Ext(v) => v.iter().all(|c| self.b().is_zero(c)),
        }
    }

    pub fn is_one(&self, x: &FFElem) -> bool {
        *x == self.one()
    }

    pub fn add(&self, a: &FFElem, b: &FFElem) -> FFElem {
        match (a, b) {
            (FFElem::Prime(x), FFElem::Prime(y)) => FFElem::Prime((x + y) % self.p),
            (FFElem::Ext(x), FFElem::Ext(y)) => {
                FFElem::Ext(x.iter().zip(y).map(|(u, v)| self.b().add(u, v)).collect())
            }
            _ => panic!("mixed tower levels"),
        }
    }

    pub fn neg(&self, a: &FFElem) -> FFElem {
        match a {
            FFElem::Prime(x) => FFElem::Prime((self.p - x) % self.p),
            FFElem::Ext(x) => FFElem::Ext(x.iter().map(|u| self.b().neg(u)).collect()),
        }
    }

    pub fn sub(&self, a: &FFElem, b: &FFElem) -> FFElem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FFElem, b: &FFElem) -> FFElem {
        match (a, b) {
            (FFElem::Prime(x), FFElem::Prime(y)) => {
                FFElem::Prime(((*x as u128 * *y as u128) % self.p as u128) as u64)
            }
            (FFElem::Ext(x), FFElem::Ext(y)) => {
                let base = self.b();
                let prod = base.poly_mul(x, y);
                let r = base.poly_rem(&prod, &self.modulus);
                let mut v = r;
                v.resize(self.degree, base.zero());
                FFElem::Ext(v)
            }
            _ => panic!("mixed tower levels"),
        }
    }

    pub fn inv(&self, a: &FFElem) -> Result<FFElem> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        match a {
            FFElem::Prime(x) => {
                let e = BigUint::from(self.p - 2);
                Ok(self.pow(&FFElem::Prime(*x), &e))
            }
            FFElem::Ext(x) => {
                let base = self.b();
                let (g, s, _) = base.poly_xgcd(&base.poly_trim(x.clone()), &self.modulus);
                // g is a nonzero constant because the modulus is irreducible
                let ginv = base.inv(&g[0])?;
                let s = base.poly_scale(&s, &ginv);
                Ok(self.from_coords(s))
            }
        }
    }

    pub fn div(&self, a: &FFElem, b: &FFElem) -> Result<FFElem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &FFElem, e: &BigUint) -> FFElem {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    /// a^e for any integer e (a must be nonzero when e < 0).
    pub fn pow_int(&self, a: &FFElem, e: i128) -> Result<FFElem> {
        let base = if e < 0 { self.inv(a)? } else { a.clone() };
        Ok(self.pow(&base, &BigUint::from(e.unsigned_abs())))
    }

    pub fn random<R: Rng>(&self, rng: &mut R) -> FFElem {
        if self.level == 0 {
            return FFElem::Prime(rng.gen_range(0..self.p));
        }
        FFElem::Ext((0..self.degree).map(|_| self.b().random(rng)).collect())
    }

    /// All elements (only sensible for tiny fields; used by tests).
    pub fn elements(&self) -> Vec<FFElem> {
        if self.level == 0 {
            return (0..self.p).map(FFElem::Prime).collect();
        }
        let be = self.b().elements();
        let mut out: Vec<Vec<FFElem>> = vec![vec![]];
        for _ in 0..self.degree {
            let mut next = Vec::new();
            for prefix in &out {
                for e in &be {
                    let mut v = prefix.clone();
                    v.push(e.clone());
                    next.push(v);
                }
            }
            out = next;
        }
        out.into_iter().map(FFElem::Ext).collect()
    }

    // ---- polynomials over this level ----

    pub fn poly_trim(&self, mut a: FFPoly) -> FFPoly {
        while a.last().is_some_and(|c| self.is_zero(c)) {
            a.pop();
        }
        a
    }

    pub fn poly_add(&self, a: &[FFElem], b: &[FFElem]) -> FFPoly {
        let n = a.len().max(b.len());
        let z = self.zero();
        let v = (0..n)
            .map(|i| self.add(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
            .collect();
        self.poly_trim(v)
    }

    pub fn poly_sub(&self, a: &[FFElem], b: &[FFElem]) -> FFPoly {
        let n = a.len().max(b.len());
        let z = self.zero();
        let v = (0..n)
            .map(|i| self.sub(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
            .collect();
        self.poly_trim(v)
    }

    pub fn poly_scale(&self, a: &[FFElem], c: &FFElem) -> FFPoly {
        self.poly_trim(a.iter().map(|x| self.mul(x, c)).collect())
    }

    pub fn poly_mul(&self, a: &[FFElem], b: &[FFElem]) -> FFPoly {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![self.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if self.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] = self.add(&out[i + j], &self.mul(x, y));
            }
        }
        self.poly_trim(out)
    }

    /// Quotient and remainder by a nonzero divisor.
    pub fn poly_divrem(&self, a: &[FFElem], b: &[FFElem]) -> (FFPoly, FFPoly) {
        let b = self.poly_trim(b.to_vec());
        assert!(!b.is_empty(), "division by zero polynomial");
        let mut r = self.poly_trim(a.to_vec());
        if r.len() < b.len() {
            return (vec![], r);
        }
        let lb_inv = self
            .inv(b.last().unwrap())
            .expect("nonzero leading coefficient");
        let db = b.len() - 1;
        let mut q = vec![self.zero(); r.len() - db];
        for i in (db..r.len()).rev() {
            let c = self.mul(&r[i], &lb_inv);
            if self.is_zero(&c) {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                r[i - db + j] = self.sub(&r[i - db + j], &self.mul(&c, bj));
            }
            q[i - db] = c;
        }
        r.truncate(db);
        (self.poly_trim(q), self.poly_trim(r))
    }

    pub fn poly_rem(&self, a: &[FFElem], b: &[FFElem]) -> FFPoly {
        if a.len() < b.len() {
            return self.poly_trim(a.to_vec());
        }
        self.poly_divrem(a, b).1
    }

    pub fn poly_monic(&self, a: &[FFElem]) -> FFPoly {
        let a = self.poly_trim(a.to_vec());
        match a.last() {
            None => a,
            Some(l) => {
                let li = self.inv(l).unwrap();
                self.poly_scale(&a, &li)
            }
        }
    }

    /// Monic gcd.
    pub fn poly_gcd(&self, a: &[FFElem], b: &[FFElem]) -> FFPoly {
        let mut a = self.poly_trim(a.to_vec());
        let mut b = self.poly_trim(b.to_vec());
        while !b.is_empty() {
            let r = self.poly_rem(&a, &b);
            a = b;
            b = r;
        }
        self.poly_monic(&a)
    }

    /// `(g, s, t)` with `s·a + t·b = g` (g not normalized).
    pub fn poly_xgcd(&self, a: &[FFElem], b: &[FFElem]) -> (FFPoly, FFPoly, FFPoly) {
        let (mut r0, mut r1) = (self.poly_trim(a.to_vec()), self.poly_trim(b.to_vec()));
        let (mut s0, mut s1) = (vec![self.one()], vec![]);
        let (mut t0, mut t1) = (vec![], vec![self.one()]);
        while !r1.is_empty() {
            let (q, r) = self.poly_divrem(&r0, &r1);
            let s2 = self.poly_sub(&s0, &self.poly_mul(&q, &s1));
            let t2 = self.poly_sub(&t0, &self.poly_mul(&q, &t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        (r0, s0, t0)
    }

    pub fn poly_deriv(&self, a: &[FFElem]) -> FFPoly {
        let v = a
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| self.mul(c, &self.from_u64(i as u64)))
            .collect();
        self.poly_trim(v)
    }

    pub fn poly_powmod(&self, a: &[FFElem], e: &BigUint, m: &[FFElem]) -> FFPoly {
        let base = self.poly_rem(a, m);
        let mut acc = vec![self.one()];
        for i in (0..e.bits()).rev() {
            acc = self.poly_rem(&self.poly_mul(&acc, &acc), m);
            if e.bit(i) {
                acc = self.poly_rem(&self.poly_mul(&acc, &base), m);
            }
        }
        acc
    }

    pub fn poly_eval(&self, a: &[FFElem], x: &FFElem) -> FFElem {
        a.iter()
            .rev()
            .fold(self.zero(), |acc, c| self.add(&self.mul(&acc, x), c))
    }

    /// Multiplicity of the irreducible `psi` in `a` (`a ≠ 0`).
    pub fn poly_ord(&self, a: &[FFElem], psi: &[FFElem]) -> usize {
        let mut a = self.poly_trim(a.to_vec());
        let mut k = 0;
        while !a.is_empty() {
            let (q, r) = self.poly_divrem(&a, psi);
            if !r.is_empty() {
                break;
            }
            a = q;
            k += 1;
        }
        k
    }

    fn pth_root(&self, a: &FFElem) -> FFElem {
        // a^(q/p)
        let e = &self.order / BigUint::from(self.p);
        self.pow(a, &e)
    }

    fn is_irreducible(&self, psi: &[FFElem]) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let f = self.factor(psi, &mut rng);
        f.len() == 1 && f[0].1 == 1 && f[0].0.len() == psi.len()
    }

    /// Factorization into monic irreducibles with multiplicities, sorted by
    /// (degree, coefficients). The leading coefficient is dropped.
    pub fn factor<R: Rng>(&self, g: &[FFElem], rng: &mut R) -> Vec<(FFPoly, usize)> {
        let g = self.poly_monic(g);
        if g.len() <= 1 {
            return vec![];
        }
        let mut out = Vec::new();
        for (sq, mult) in self.squarefree(&g) {
            for (part, d) in self.distinct_degree(&sq) {
                for fac in self.equal_degree(&part, d, rng) {
                    out.push((fac, mult));
                }
            }
        }
        out.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
        out
    }

    /// Squarefree decomposition of a monic polynomial.
    pub fn squarefree(&self, f: &[FFElem]) -> Vec<(FFPoly, usize)> {
        let mut out = Vec::new();
        let f = self.poly_monic(f);
        if f.len() <= 1 {
            return out;
        }
        let d = self.poly_deriv(&f);
        if d.is_empty() {
            let root = self.poly_pth_root(&f);
            for (g, m) in self.squarefree(&root) {
                out.push((g, m * self.p as usize));
            }
            return out;
        }
        let mut c = self.poly_gcd(&f, &d);
        let mut w = self.poly_divrem(&f, &c).0;
        let mut i = 1;
        while w.len() > 1 {
            let y = self.poly_gcd(&w, &c);
            let z = self.poly_divrem(&w, &y).0;
            if z.len() > 1 {
                out.push((self.poly_monic(&z), i));
            }
            i += 1;
            w = y;
            c = self.poly_divrem(&c, &w).0;
        }
        if c.len() > 1 {
            let root = self.poly_pth_root(&c);
            for (g, m) in self.squarefree(&root) {
                out.push((g, m * self.p as usize));
            }
        }
        out
    }

    fn poly_pth_root(&self, f: &[FFElem]) -> FFPoly {
        let p = self.p as usize;
        let v: FFPoly = f.iter().step_by(p).map(|c| self.pth_root(c)).collect();
        self.poly_monic(&v)
    }

    /// Splits a squarefree monic polynomial into products of equal-degree irreducibles.
    pub fn distinct_degree(&self, f: &[FFElem]) -> Vec<(FFPoly, usize)> {
        let mut out = Vec::new();
        let mut f = self.poly_monic(f);
        let y = vec![self.zero(), self.one()];
        let mut h = self.poly_rem(&y, &f);
        let mut d = 1;
        while f.len() > 2 * d {
            h = self.poly_powmod(&h, &self.order, &f);
            let g = self.poly_gcd(&self.poly_sub(&h, &y), &f);
            if g.len() > 1 {
                f = self.poly_divrem(&f, &g).0;
                h = self.poly_rem(&h, &f);
                out.push((g, d));
            }
            d += 1;
        }
        if f.len() > 1 {
            let n = f.len() - 1;
            out.push((f, n));
        }
        out
    }

    /// Randomized equal-degree splitting.
    pub fn equal_degree<R: Rng>(&self, f: &[FFElem], d: usize, rng: &mut R) -> Vec<FFPoly> {
        let f = self.poly_monic(f);
        let n = f.len() - 1;
        if n == d {
            return vec![f];
        }
        loop {
            let a: FFPoly = self.poly_trim((0..n).map(|_| self.random(rng)).collect());
            if a.len() < 2 {
                continue;
            }
            let b = if self.p == 2 {
                // absolute trace: a + a^2 + … + a^(2^(k d - 1))
                let k = self.abs_degree * d;
                let mut t = a.clone();
                let mut acc = a.clone();
                for _ in 1..k {
                    t = self.poly_rem(&self.poly_mul(&t, &t), &f);
                    acc = self.poly_add(&acc, &t);
                }
                acc
            } else {
                let e = (self.order.pow(d as u32) - BigUint::one()) >> 1;
                let t = self.poly_powmod(&a, &e, &f);
                self.poly_sub(&t, &[self.one()])
            };
            let g = self.poly_gcd(&b, &f);
            if g.len() > 1 && g.len() < f.len() {
                let h = self.poly_divrem(&f, &g).0;
                let mut out = self.equal_degree(&g, d, rng);
                out.extend(self.equal_degree(&h, d, rng));
                return out;
            }
        }
    }
}

/// Deterministic generator for residue-field randomness.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[allow(dead_code)]
fn is_zero_poly(a: &[FFElem]) -> bool {
    a.is_empty()
}

impl FFElem {
    pub fn prime_value(&self) -> Option<u64> {
        match self {
            FFElem::Prime(v) => Some(*v),
            _ => None,
        }
    }
}
