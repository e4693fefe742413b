//! Exact integer polynomials: the oracle layer for generators and discriminants.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::padic::{int_poly_mul, val_p};

/// A polynomial over `Z`, constant-first, trailing zeros trimmed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ZPoly {
    coeffs: Vec<BigInt>,
}

impl ZPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        ZPoly { coeffs }
    }

    pub fn from_i64s(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::new(vec![c.into()])
    }

    pub fn x() -> Self {
        Self::from_i64s(&[0, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lc(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.c(i) + o.c(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.c(i) - o.c(i)).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(int_poly_mul(&self.coeffs, &o.coeffs))
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = ZPoly::constant(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    fn c(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Pseudo-remainder `lc(b)^(deg a - deg b + 1) · a mod b`.
    fn prem(a: &Self, b: &Self) -> Self {
        let db = b.coeffs.len() - 1;
        let lb = b.lc();
        let mut r = a.coeffs.clone();
        let mut steps = (a.coeffs.len() - 1 - db + 1) as u32;
        while r.len() > db && !r.is_empty() {
            let lr = r.last().unwrap().clone();
            let shift = r.len() - 1 - db;
            for c in r.iter_mut() {
                *c *= &lb;
            }
            for (j, bj) in b.coeffs.iter().enumerate() {
                r[shift + j] -= &lr * bj;
            }
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
            steps -= 1;
        }
        let k = lb.pow(steps);
        Self::new(r.into_iter().map(|c| c * &k).collect())
    }

    /// `Res(a, b)` by the subresultant remainder sequence over exact integers.
    pub fn resultant(a: &Self, b: &Self) -> BigInt {
        if a.is_zero() || b.is_zero() {
            return BigInt::zero();
        }
        let (mut a, mut b) = (a.clone(), b.clone());
        let mut s = BigInt::one();
        let deg = |x: &ZPoly| x.coeffs.len() - 1;
        if deg(&a) < deg(&b) {
            if deg(&a) % 2 == 1 && deg(&b) % 2 == 1 {
                s = -s;
            }
            std::mem::swap(&mut a, &mut b);
        }
        if deg(&b) == 0 {
            return b.lc().pow(deg(&a) as u32) * s;
        }
        let ca = a.content();
        let cb = b.content();
        let t = ca.pow(deg(&b) as u32) * cb.pow(deg(&a) as u32);
        a = Self::new(a.coeffs.iter().map(|c| c / &ca).collect());
        b = Self::new(b.coeffs.iter().map(|c| c / &cb).collect());
        let mut g = BigInt::one();
        let mut h = BigInt::one();
        loop {
            let delta = (deg(&a) - deg(&b)) as u32;
            if deg(&a) % 2 == 1 && deg(&b) % 2 == 1 {
                s = -s;
            }
            let r = Self::prem(&a, &b);
            a = b;
            if r.is_zero() {
                return BigInt::zero();
            }
            let d = &g * h.pow(delta);
            b = Self::new(r.coeffs.iter().map(|c| c / &d).collect());
            g = a.lc();
            h = if delta == 0 {
                h
            } else {
                g.pow(delta) / h.pow(delta - 1)
            };
            if deg(&b) == 0 {
                let da = deg(&a) as u32;
                let hh = if da == 0 {
                    b.lc().pow(da) * &h
                } else {
                    b.lc().pow(da) / h.pow(da - 1)
                };
                return s * t * hh;
            }
        }
    }

    /// `v_p(disc f)` from the exact resultant `Res(f, f')`.
    pub fn disc_valuation(&self, p: u64) -> Result<u64> {
        let r = Self::resultant(self, &self.derivative());
        if r.is_zero() {
            return Err(Error::ZeroDiscriminant);
        }
        let cap = u32::MAX;
        let v = val_p(&r, p, cap) as u64;
        let vl = val_p(&self.lc(), p, cap) as u64;
        Ok(v - vl)
    }

    /// Separability over `Q`, certified by a coprimality check modulo a few
    /// large primes (a nonzero resultant survives reduction modulo some of them).
    pub fn is_separable(&self) -> bool {
        const PRIMES: [u64; 6] = [
            4_611_686_018_427_387_847,
            4_611_686_018_427_387_817,
            4_611_686_018_427_387_787,
            2_305_843_009_213_693_951,
            1_000_000_000_000_000_003,
            999_999_999_999_999_989,
        ];
        if self.degree().unwrap_or(0) == 0 {
            return true;
        }
        let d = self.derivative();
        for q in PRIMES {
            let bq = BigInt::from(q);
            let red = |f: &ZPoly| -> Vec<u64> {
                f.coeffs
                    .iter()
                    .map(|c| c.mod_floor(&bq).to_u64().unwrap())
                    .collect()
            };
            let a = red(self);
            if *a.last().unwrap() == 0 {
                continue;
            }
            if small_gcd_degree(a, red(&d), q) == 0 {
                return true;
            }
        }
        false
    }

    /// Reads the constant-first decimal text format, e.g. `"5,0,1"` for `x^2+5`.
    pub fn parse_coeffs(s: &str) -> Result<Self> {
        let mut v = Vec::new();
        for tok in s.split(',') {
            let t = tok.trim();
            let c =
                BigInt::from_str(t).map_err(|_| Error::Parse(format!("bad coefficient '{t}'")))?;
            v.push(c);
        }
        Ok(Self::new(v))
    }

    /// Reads either the coefficient list format or an expression in `x` and `p`
    /// (`+ - * ^`, parentheses, integer literals).
    pub fn parse(s: &str, p: Option<u64>) -> Result<Self> {
        let t = s.trim();
        if t.chars()
            .all(|c| c.is_ascii_digit() || c == ',' || c == '-' || c.is_whitespace())
            && !t.is_empty()
        {
            return Self::parse_coeffs(t);
        }
        ExprParser::new(t, p).parse()
    }

    /// Constant-first comma-separated decimal text.
    pub fn to_text(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        self.coeffs
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn mulm(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

fn invm(a: u64, q: u64) -> u64 {
    let mut r = 1u64;
    let mut b = a;
    let mut e = q - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, b, q);
        }
        b = mulm(b, b, q);
        e >>= 1;
    }
    r
}

/// Degree of `gcd(a, b)` over `F_q`.
fn small_gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>, q: u64) -> usize {
    let trim = |v: &mut Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
    };
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let inv = invm(*b.last().unwrap(), q);
        while a.len() >= b.len() {
            let c = mulm(*a.last().unwrap(), inv, q);
            let s = a.len() - b.len();
            for (j, bj) in b.iter().enumerate() {
                a[s + j] = (a[s + j] + q - mulm(c, *bj, q)) % q;
            }
            trim(&mut a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

struct ExprParser<'a> {
    s: &'a [u8],
    i: usize,
    p: Option<u64>,
}

impl<'a> ExprParser<'a> {
    fn new(s: &'a str, p: Option<u64>) -> Self {
        ExprParser {
            s: s.as_bytes(),
            i: 0,
            p,
        }
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse(format!("{msg} at offset {}", self.i)))
    }

    fn peek(&mut self) -> Option<u8> {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
        self.s.get(self.i).copied()
    }

    fn parse(mut self) -> Result<ZPoly> {
        let e = self.sum()?;
        if self.peek().is_some() {
            return self.err("trailing input");
        }
        Ok(e)
    }

    fn sum(&mut self) -> Result<ZPoly> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.i += 1;
                self.product()?.neg()
            }
            Some(b'+') => {
                self.i += 1;
                self.product()?
            }
            _ => self.product()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.i += 1;
                    acc = acc.add(&self.product()?);
                }
                Some(b'-') => {
                    self.i += 1;
                    acc = acc.sub(&self.product()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<ZPoly> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.i += 1;
                    acc = acc.mul(&self.power()?);
                }
                Some(b'(') | Some(b'x') | Some(b'p') => acc = acc.mul(&self.power()?),
                Some(c) if c.is_ascii_digit() => acc = acc.mul(&self.power()?),
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<ZPoly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.i += 1;
            self.peek();
            let start = self.i;
            while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                self.i += 1;
            }
            let e: u32 = std::str::from_utf8(&self.s[start..self.i])
                .unwrap()
                .parse()
                .map_err(|_| Error::Parse("bad exponent".into()))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ZPoly> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let e = self.sum()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.i += 1;
                Ok(e)
            }
            Some(b'x') => {
                self.i += 1;
                Ok(ZPoly::x())
            }
            Some(b'p') => {
                self.i += 1;
                match self.p {
                    Some(p) => Ok(ZPoly::constant(p)),
                    None => self.err("'p' used without a prime"),
                }
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.i;
                while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                    self.i += 1;
                }
                let n =
                    BigInt::from_str(std::str::from_utf8(&self.s[start..self.i]).unwrap()).unwrap();
                Ok(ZPoly::constant(n))
            }
            _ => self.err("unexpected token"),
        }
    }
}
