//! Oracles written independently of the library's arithmetic: plain integer
//! vectors, schoolbook algorithms, no shared helpers.

#![allow(dead_code)]

pub mod props;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use padic_montes::ZPoly;

pub type Poly = Vec<BigInt>;

pub fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

fn trim(mut a: Poly) -> Poly {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

fn reduce(a: &[BigInt], m: &BigInt) -> Poly {
    trim(a.iter().map(|c| c.mod_floor(m)).collect())
}

fn add(a: &[BigInt], b: &[BigInt]) -> Poly {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default())
        .collect()
}

fn sub(a: &[BigInt], b: &[BigInt]) -> Poly {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default())
        .collect()
}

fn mul(a: &[BigInt], b: &[BigInt]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Division with remainder by a monic `b`, coefficients reduced modulo `m`.
fn divrem_monic(a: &[BigInt], b: &[BigInt], m: &BigInt) -> (Poly, Poly) {
    let b = reduce(b, m);
    assert!(
        b.last().is_some_and(|c| c.is_one()),
        "divisor must be monic"
    );
    let db = b.len() - 1;
    let mut r = reduce(a, m);
    if r.len() <= db {
        return (vec![], r);
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    for k in (0..q.len()).rev() {
        let c = r[k + db].clone();
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            r[k + j] = (&r[k + j] - &c * bj).mod_floor(m);
        }
        q[k] = c;
    }
    r.truncate(db);
    (trim(q), trim(r))
}

fn inv_mod(a: &BigInt, m: &BigInt) -> BigInt {
    let g = a.extended_gcd(m);
    assert!(g.gcd.is_one() || (-&g.gcd).is_one(), "not invertible");
    (g.x * &g.gcd).mod_floor(m)
}

/// Extended Euclid over F_p: (s, t) with s·a + t·b = 1, assuming gcd 1.
fn xgcd_fp(a: &[BigInt], b: &[BigInt], p: &BigInt) -> (Poly, Poly) {
    let divrem_fp = |x: &[BigInt], y: &[BigInt]| -> (Poly, Poly) {
        let y = reduce(y, p);
        let lc_inv = inv_mod(y.last().unwrap(), p);
        let ym: Poly = y.iter().map(|c| (c * &lc_inv).mod_floor(p)).collect();
        let (q, r) = divrem_monic(x, &ym, p);
        (
            reduce(&q.iter().map(|c| c * &lc_inv).collect::<Vec<_>>(), p),
            r,
        )
    };
    let (mut r0, mut r1) = (reduce(a, p), reduce(b, p));
    let (mut s0, mut s1) = (vec![BigInt::one()], vec![]);
    let (mut t0, mut t1) = (vec![], vec![BigInt::one()]);
    while !r1.is_empty() {
        let (q, r) = divrem_fp(&r0, &r1);
        let s2 = reduce(&sub(&s0, &mul(&q, &s1)), p);
        let t2 = reduce(&sub(&t0, &mul(&q, &t1)), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    assert_eq!(r0.len(), 1, "inputs are not coprime mod p");
    let c = inv_mod(&r0[0], p);
    let scale = |v: &[BigInt]| reduce(&v.iter().map(|x| x * &c).collect::<Vec<_>>(), p);
    (scale(&s0), scale(&t0))
}

/// Quadratic Hensel lifting of f ≡ g·h (mod p), h = `hbar` monic and coprime
/// to g; returns h lifted modulo p^nu as canonical residues, constant first.
pub fn hensel_oracle(f: &ZPoly, p: u64, hbar: &[u64], nu: u32) -> Poly {
    let pb = BigInt::from(p);
    let fz: Poly = f.coeffs().to_vec();
    let hb: Poly = hbar.iter().map(|&c| BigInt::from(c)).collect();
    let (gb, r) = divrem_monic(&fz, &hb, &pb);
    assert!(r.is_empty(), "hbar does not divide f mod p");
    let (s0, t0) = xgcd_fp(&gb, &hb, &pb);
    let (mut g, mut h, mut s, mut t) = (gb, hb, s0, t0);
    let mut k = 1u32;
    while k < nu {
        k = (2 * k).min(nu);
        let m = pb.pow(k);
        let e = reduce(&sub(&fz, &mul(&g, &h)), &m);
        let (q, r) = divrem_monic(&mul(&s, &e), &h, &m);
        let g1 = reduce(&add(&add(&g, &mul(&t, &e)), &mul(&q, &g)), &m);
        let h1 = reduce(&add(&h, &r), &m);
        let b = reduce(
            &sub(&add(&mul(&s, &g1), &mul(&t, &h1)), &[BigInt::one()]),
            &m,
        );
        let (c, d) = divrem_monic(&mul(&s, &b), &h1, &m);
        s = reduce(&sub(&s, &d), &m);
        t = reduce(&sub(&sub(&t, &mul(&t, &b)), &mul(&c, &g1)), &m);
        g = g1;
        h = h1;
    }
    reduce(&h, &pb.pow(nu))
}

/// Canonical residues modulo p^nu of an integer polynomial.
pub fn residues(c: &[BigInt], p: u64, nu: u32) -> Poly {
    reduce(c, &BigInt::from(p).pow(nu))
}

/// Res(a, b) as the determinant of the Sylvester matrix (fraction-free Bareiss).
pub fn resultant_oracle(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let (a, b) = (trim(a.to_vec()), trim(b.to_vec()));
    let (m, n) = (a.len() - 1, b.len() - 1);
    let size = m + n;
    if size == 0 {
        return BigInt::one();
    }
    let mut mat = vec![vec![BigInt::zero(); size]; size];
    for i in 0..n {
        for (j, c) in a.iter().rev().enumerate() {
            mat[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in b.iter().rev().enumerate() {
            mat[n + i][i + j] = c.clone();
        }
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..size - 1 {
        if mat[k][k].is_zero() {
            let Some(sw) = (k + 1..size).find(|&i| !mat[i][k].is_zero()) else {
                return BigInt::zero();
            };
            mat.swap(k, sw);
            sign = -sign;
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let v = &mat[i][j] * &mat[k][k] - &mat[i][k] * &mat[k][j];
                mat[i][j] = v / &prev;
            }
        }
        prev = mat[k][k].clone();
    }
    sign * &mat[size - 1][size - 1]
}

/// v_p of a nonzero integer.
pub fn vp(x: &BigInt, p: u64) -> u64 {
    assert!(!x.is_zero());
    let pb = BigInt::from(p);
    let mut x = x.abs();
    let mut v = 0;
    while (&x % &pb).is_zero() {
        x /= &pb;
        v += 1;
    }
    v
}

/// A random Eisenstein polynomial of degree n at p, shifted by x ↦ x − c
/// (so its reduction is (x − c)^n): irreducible over Q_p by construction.
pub fn random_shifted_eisenstein<R: Rng>(rng: &mut R, p: u64, n: usize, c: i64) -> ZPoly {
    let p = p as i64;
    let mut e: Vec<i64> = (0..n).map(|_| p * rng.gen_range(-4..=4)).collect();
    e[0] = p * (rng.gen_range(1..p) + p * rng.gen_range(-2..=2));
    e.push(1);
    let eis: Poly = e.into_iter().map(BigInt::from).collect();
    // compose with x − c by Horner
    let lin = vec![big(-c), big(1)];
    let mut acc: Poly = vec![];
    for coef in eis.iter().rev() {
        acc = add(&mul(&acc, &lin), std::slice::from_ref(coef));
    }
    ZPoly::new(trim(acc))
}

/// Two distinct irreducible factors F, G with F·G separable.
pub fn random_known_pair<R: Rng>(rng: &mut R) -> (u64, ZPoly, ZPoly) {
    const PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];
    loop {
        let p = PRIMES[rng.gen_range(0..PRIMES.len())];
        let (n1, n2) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let c1 = rng.gen_range(0..p as i64);
        let c2 = if rng.gen_bool(0.5) {
            c1
        } else {
            rng.gen_range(0..p as i64)
        };
        let f = random_shifted_eisenstein(rng, p, n1, c1);
        let g = random_shifted_eisenstein(rng, p, n2, c2);
        if f != g && !resultant_oracle(f.coeffs(), g.coeffs()).is_zero() {
            return (p, f, g);
        }
    }
}

/// A random monic polynomial with squarefree reduction mod p.
pub fn random_squarefree<R: Rng>(rng: &mut R, p: u64, n: usize) -> ZPoly {
    let pb = BigInt::from(p);
    loop {
        let mut c: Poly = (0..n).map(|_| big(rng.gen_range(-1000..=1000))).collect();
        c.push(BigInt::one());
        let f = ZPoly::new(c.clone());
        // squarefree mod p ⇔ gcd(f̄, f̄') = 1, checked with the oracle's own Euclid
        let d: Poly = (1..c.len()).map(|i| &c[i] * BigInt::from(i)).collect();
        let fb = reduce(&c, &pb);
        let db = reduce(&d, &pb);
        if db.is_empty() {
            continue;
        }
        if gcd_degree_fp(&fb, &db, &pb) == 0 {
            return f;
        }
    }
}

fn gcd_degree_fp(a: &[BigInt], b: &[BigInt], p: &BigInt) -> usize {
    let (mut r0, mut r1) = (reduce(a, p), reduce(b, p));
    while !r1.is_empty() {
        let lc_inv = inv_mod(r1.last().unwrap(), p);
        let ym: Poly = r1.iter().map(|c| (c * &lc_inv).mod_floor(p)).collect();
        let (_, r) = divrem_monic(&r0, &ym, p);
        r0 = std::mem::replace(&mut r1, r);
    }
    r0.len() - 1
}
