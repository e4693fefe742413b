//! Exact generators for the parametric benchmark families and their
//! closed-form invariant rows.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::is_prime;
use crate::zpoly::ZPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Family {
    /// `(x+1+p+…+p^r)^n + p^k`: one totally ramified factor of depth 1.
    A,
    /// Product of `m` shifted copies of `x^n + 2p^k`, perturbed by `2p^{mnk}`.
    Am,
    /// `(x²−2x+4)³ + p^k`: two cubic factors.
    B,
    /// `((x⁶+4px³+3p²x²+4p²)² + p⁶)³ + p^k`: six factors of degree 6.
    C,
    /// `Φ_ℓ(x)^n + p^k` with Φ_ℓ the ℓ-th cyclotomic polynomial.
    D,
    /// The recursive chain `E_1, …, E_8` of growing depth.
    E,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::A => "A",
            Family::Am => "Am",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
            Family::E => "E",
        }
    }

    /// Parameter names, in canonical order.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Family::A => &["p", "n", "k", "r"],
            Family::Am => &["p", "n", "k", "m"],
            Family::B => &["p", "k"],
            Family::C => &["p", "k"],
            Family::D => &["l", "p", "n", "k"],
            Family::E => &["p", "j"],
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Family::A),
            "AM" | "A^M" => Ok(Family::Am),
            "B" => Ok(Family::B),
            "C" => Ok(Family::C),
            "D" => Ok(Family::D),
            "E" => Ok(Family::E),
            other => Err(Error::BadParams(format!("unknown family '{other}'"))),
        }
    }
}

/// A family together with named integer parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilySpec {
    pub family: Family,
    pub params: BTreeMap<String, i64>,
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ps: Vec<String> = self
            .family
            .param_names()
            .iter()
            .filter_map(|n| self.params.get(*n).map(|v| format!("{n}={v}")))
            .collect();
        write!(f, "{}[{}]", self.family.name(), ps.join(","))
    }
}

fn v_p(mut n: i64, p: i64) -> i64 {
    let mut v = 0;
    while n != 0 && n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Multiplicative order of `p` modulo the prime `l`.
fn mult_order(p: i64, l: i64) -> i64 {
    let base = p.rem_euclid(l);
    let mut x = base;
    let mut k = 1;
    while x != 1 {
        x = x * base % l;
        k += 1;
    }
    k
}

fn big_pow(p: i64, k: i64) -> BigInt {
    Pow::pow(BigInt::from(p), k as u64)
}

impl FamilySpec {
    /// Builds a spec from `name=value` pairs and checks the family constraints.
    pub fn new(family: Family, params: &[(&str, i64)]) -> Result<Self> {
        let spec = FamilySpec {
            family,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        };
        spec.check()?;
        Ok(spec)
    }

    pub fn a(p: i64, n: i64, k: i64, r: i64) -> Result<Self> {
        Self::new(Family::A, &[("p", p), ("n", n), ("k", k), ("r", r)])
    }

    pub fn am(p: i64, n: i64, k: i64, m: i64) -> Result<Self> {
        Self::new(Family::Am, &[("p", p), ("n", n), ("k", k), ("m", m)])
    }

    pub fn b(p: i64, k: i64) -> Result<Self> {
        Self::new(Family::B, &[("p", p), ("k", k)])
    }

    pub fn c(p: i64, k: i64) -> Result<Self> {
        Self::new(Family::C, &[("p", p), ("k", k)])
    }

    pub fn d(l: i64, p: i64, n: i64, k: i64) -> Result<Self> {
        Self::new(Family::D, &[("l", l), ("p", p), ("n", n), ("k", k)])
    }

    pub fn e(p: i64, j: i64) -> Result<Self> {
        Self::new(Family::E, &[("p", p), ("j", j)])
    }

    /// Reads `"p=5,n=2,k=3,r=0"`; `ℓ` may be spelled `l` or `ell`.
    pub fn parse(family: &str, params: &str) -> Result<Self> {
        let family: Family = family.parse()?;
        let mut pairs = Vec::new();
        for tok in params.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| Error::BadParams(format!("expected name=value, got '{tok}'")))?;
            let v: i64 = v
                .trim()
                .parse()
                .map_err(|_| Error::BadParams(format!("bad integer in '{tok}'")))?;
            let k = match k.trim() {
                "ell" | "ℓ" => "l",
                other => other,
            };
            pairs.push((k.to_string(), v));
        }
        let spec = FamilySpec {
            family,
            params: pairs.into_iter().collect(),
        };
        spec.check()?;
        Ok(spec)
    }

    pub fn get(&self, name: &str) -> Result<i64> {
        self.params.get(name).copied().ok_or_else(|| {
            Error::BadParams(format!(
                "{}: missing parameter '{name}'",
                self.family.name()
            ))
        })
    }

    /// The prime the invariants refer to.
    pub fn prime(&self) -> u64 {
        self.params.get("p").copied().unwrap_or(0) as u64
    }

    fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::BadParams(format!("{}: {msg}", self.family.name())));
        for n in self.family.param_names() {
            self.get(n)?;
        }
        if let Some(extra) = self
            .params
            .keys()
            .find(|k| !self.family.param_names().contains(&k.as_str()))
        {
            return bad(format!("unexpected parameter '{extra}'"));
        }
        let p = self.get("p")?;
        if p < 2 || !is_prime(p as u64) {
            return bad(format!("p = {p} is not prime"));
        }
        match self.family {
            Family::A => {
                let (n, k, r) = (self.get("n")?, self.get("k")?, self.get("r")?);
                if n < 1 || k < 1 {
                    return bad("need n, k ≥ 1".into());
                }
                if n.gcd(&k) != 1 {
                    return bad(format!("gcd(n, k) = gcd({n}, {k}) ≠ 1"));
                }
                if r < 0 || r > k / n {
                    return bad(format!("need 0 ≤ r ≤ ⌊k/n⌋ = {}", k / n));
                }
            }
            Family::Am => {
                let (n, k, m) = (self.get("n")?, self.get("k")?, self.get("m")?);
                if p <= 3 {
                    return bad("need p > 3".into());
                }
                if n < 1 || k < 1 || n.gcd(&k) != 1 {
                    return bad(format!("need coprime n, k ≥ 1 (got {n}, {k})"));
                }
                if k <= n * v_p(n, p) {
                    return bad(format!("need k > n·v_p(n) = {}", n * v_p(n, p)));
                }
                if m <= 1 || 2 * m >= p {
                    return bad(format!("need 1 < m < p/2 (got m = {m})"));
                }
            }
            Family::B => {
                let k = self.get("k")?;
                if p % 3 != 1 {
                    return bad("need p ≡ 1 (mod 3)".into());
                }
                if k < 1 || k % 3 == 0 {
                    return bad(format!("need k ≥ 1, k ≢ 0 (mod 3) (got {k})"));
                }
            }
            Family::C => {
                let k = self.get("k")?;
                if p % 12 != 5 {
                    return bad("need p ≡ 5 (mod 12)".into());
                }
                if k <= 18 {
                    return bad(format!("need k > 18 (got {k})"));
                }
            }
            Family::D => {
                let (l, n, k) = (self.get("l")?, self.get("n")?, self.get("k")?);
                if l < 2 || !is_prime(l as u64) || l == p {
                    return bad(format!("need ℓ prime and ℓ ≠ p (got ℓ = {l})"));
                }
                if n < 1 || k < 1 || n.gcd(&k) != 1 {
                    return bad(format!("need coprime n, k ≥ 1 (got {n}, {k})"));
                }
            }
            Family::E => {
                let j = self.get("j")?;
                if p <= 3 {
                    return bad("need p > 3".into());
                }
                if !(1..=8).contains(&j) {
                    return bad(format!("need 1 ≤ j ≤ 8 (got {j})"));
                }
            }
        }
        Ok(())
    }
}

fn lin(c: BigInt) -> ZPoly {
    ZPoly::new(vec![c, BigInt::one()])
}

/// The exact integer polynomial of a family member.
pub fn gen_family(spec: &FamilySpec) -> Result<ZPoly> {
    spec.check()?;
    let p = spec.get("p")?;
    let g = |n: &str| spec.get(n);
    Ok(match spec.family {
        Family::A => {
            let (n, k, r) = (g("n")?, g("k")?, g("r")?);
            let shift: BigInt = (0..=r).map(|i| big_pow(p, i)).sum();
            lin(shift)
                .pow(n as u32)
                .add(&ZPoly::constant(big_pow(p, k)))
        }
        Family::Am => {
            let (n, k, m) = (g("n")?, g("k")?, g("m")?);
            let two_pk = ZPoly::constant(BigInt::from(2) * big_pow(p, k));
            let mut acc = ZPoly::constant(1);
            for j in 0..m {
                acc = acc.mul(&lin(BigInt::from(2 * j)).pow(n as u32).add(&two_pk));
            }
            acc.add(&ZPoly::constant(BigInt::from(2) * big_pow(p, m * n * k)))
        }
        Family::B => ZPoly::from_i64s(&[4, -2, 1])
            .pow(3)
            .add(&ZPoly::constant(big_pow(p, g("k")?))),
        Family::C => {
            let pb = BigInt::from(p);
            let inner = ZPoly::new(vec![
                BigInt::from(4) * &pb * &pb,
                BigInt::from(0),
                BigInt::from(3) * &pb * &pb,
                BigInt::from(4) * &pb,
                BigInt::from(0),
                BigInt::from(0),
                BigInt::one(),
            ]);
            inner
                .pow(2)
                .add(&ZPoly::constant(big_pow(p, 6)))
                .pow(3)
                .add(&ZPoly::constant(big_pow(p, g("k")?)))
        }
        Family::D => {
            let (l, n, k) = (g("l")?, g("n")?, g("k")?);
            let cyclo = ZPoly::new(vec![BigInt::one(); l as usize]);
            cyclo.pow(n as u32).add(&ZPoly::constant(big_pow(p, k)))
        }
        Family::E => e_chain(p, g("j")? as usize).pop().expect("non-empty chain"),
    })
}

/// `[E_1, …, E_j]` built by the defining recursion.
pub fn e_chain(p: i64, j: usize) -> Vec<ZPoly> {
    let c = |v: BigInt| ZPoly::constant(v);
    let pk = |k: i64| big_pow(p, k);
    let pm1 = BigInt::from(p - 1);
    let x = ZPoly::x();
    let mut e: Vec<ZPoly> = Vec::with_capacity(j);
    for i in 1..=j {
        let next = match i {
            1 => ZPoly::from_i64s(&[p, 0, 1]),
            2 => e[0].pow(2).add(&x.scale(&(&pm1 * pk(3)))),
            3 => e[1].pow(3).add(&c(pk(11))),
            4 => e[2].pow(3).add(&x.mul(&e[1]).scale(&pk(29))),
            5 => e[3]
                .pow(2)
                .add(&x.mul(&e[0]).mul(&e[2].pow(2)).scale(&(&pm1 * pk(42)))),
            6 => e[4].pow(2).add(&x.mul(&e[2]).mul(&e[3]).scale(&pk(88))),
            7 => e[5].pow(3).add(&e[1].mul(&e[3]).mul(&e[4]).scale(&pk(295))),
            8 => e[6].pow(2).add(
                &x.mul(&e[0])
                    .mul(&e[1].pow(2))
                    .mul(&e[2].pow(2))
                    .mul(&e[5])
                    .scale(&(&pm1 * pk(632))),
            ),
            _ => unreachable!("checked range"),
        };
        e.push(next);
    }
    e
}

/// One row of closed-form characteristics.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExpectedRow {
    pub degree: usize,
    pub n_factors: usize,
    /// Maximum depth over the factors.
    pub depth: usize,
    /// Per-factor width vectors, when the closed form determines them.
    pub widths: Option<Vec<Vec<i64>>>,
    /// Sum of all width components over all factors.
    pub width_sum: i64,
    pub ind_p: i64,
    pub delta_p: i64,
    /// `(e, f)` of each prime above p, sorted.
    pub splitting: Vec<(i64, i64)>,
}

impl ExpectedRow {
    /// Names of the fields on which two rows disagree.
    pub fn diff(&self, other: &ExpectedRow) -> Vec<&'static str> {
        let mut d = Vec::new();
        if self.degree != other.degree {
            d.push("degree");
        }
        if self.n_factors != other.n_factors {
            d.push("n_factors");
        }
        if self.depth != other.depth {
            d.push("depth");
        }
        if let (Some(a), Some(b)) = (&self.widths, &other.widths) {
            if a != b {
                d.push("widths");
            }
        }
        if self.width_sum != other.width_sum {
            d.push("width_sum");
        }
        if self.ind_p != other.ind_p {
            d.push("ind_p");
        }
        if self.delta_p != other.delta_p {
            d.push("delta_p");
        }
        if self.splitting != other.splitting {
            d.push("splitting");
        }
        d
    }
}

/// Rendering of a splitting list as `𝔭_f^e` terms (trivial indices omitted).
pub fn splitting_string(split: &[(i64, i64)]) -> String {
    split
        .iter()
        .map(|&(e, f)| {
            let mut s = "𝔭".to_string();
            if f != 1 {
                s.push_str(&format!("_{f}"));
            }
            if e != 1 {
                s.push_str(&format!("^{e}"));
            }
            s
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Printed index and field-discriminant values for the E chain, j = 3..=8.
const E_IND: [i64; 6] = [52, 553, 2300, 9378, 85476, 342981];
const E_DEG: [usize; 8] = [2, 4, 12, 36, 72, 144, 432, 864];

fn ceil_div(a: i64, b: i64) -> i64 {
    Integer::div_ceil(&a, &b)
}

/// The closed-form row for a family member, as printed with the family.
pub fn expected_invariants(spec: &FamilySpec) -> Result<ExpectedRow> {
    spec.check()?;
    let p = spec.get("p")?;
    let g = |n: &str| spec.get(n);
    Ok(match spec.family {
        Family::A => {
            let (n, k) = (g("n")?, g("k")?);
            let w = ceil_div(k, n);
            ExpectedRow {
                degree: n as usize,
                n_factors: 1,
                depth: 1,
                widths: Some(vec![vec![w]]),
                width_sum: w,
                ind_p: (k - 1) * (n - 1) / 2,
                delta_p: n * v_p(n, p) + n - 1,
                splitting: vec![(n, 1)],
            }
        }
        Family::Am => {
            let (n, k, m) = (g("n")?, g("k")?, g("m")?);
            let w = ceil_div(k, n);
            ExpectedRow {
                degree: (n * m) as usize,
                n_factors: m as usize,
                depth: 1,
                widths: Some(vec![vec![w]; m as usize]),
                width_sum: m * w,
                ind_p: m * (k - 1) * (n - 1) / 2,
                delta_p: m * (n * v_p(n, p) + n - 1),
                splitting: vec![(n, 1); m as usize],
            }
        }
        Family::B => {
            let k = g("k")?;
            let w = ceil_div(k, 3);
            ExpectedRow {
                degree: 6,
                n_factors: 2,
                depth: 1,
                widths: Some(vec![vec![w]; 2]),
                width_sum: 2 * w,
                ind_p: 2 * (k - 1),
                delta_p: 4,
                splitting: vec![(3, 1); 2],
            }
        }
        Family::C => {
            let k = g("k")?;
            ExpectedRow {
                degree: 36,
                n_factors: 6,
                depth: 3,
                widths: Some(vec![vec![1, 1, k - 17]; 6]),
                width_sum: 6 * k - 90,
                ind_p: 12 * k + 78,
                delta_p: 24,
                splitting: vec![(3, 2); 6],
            }
        }
        Family::D => {
            let (l, n, k) = (g("l")?, g("n")?, g("k")?);
            let f = mult_order(p, l);
            let gg = (l - 1) / f;
            let w = ceil_div(k, n);
            ExpectedRow {
                degree: (n * (l - 1)) as usize,
                n_factors: gg as usize,
                depth: 1,
                widths: Some(vec![vec![w]; gg as usize]),
                width_sum: gg * w,
                ind_p: (n - 1) * (l - 1) * (k - 1) / 2,
                delta_p: (l - 1) * (n * v_p(n, p) + n - 1),
                splitting: vec![(n, f); gg as usize],
            }
        }
        Family::E => {
            let j = g("j")? as usize;
            let deg = E_DEG[j - 1];
            // The first two members are not tabulated; their rows follow from the
            // index formula (ind 0 and 3) and tame total ramification (Δ = deg − 1).
            let (ind, width_sum) = match j {
                1 => (0, 1),
                2 => (3, 3),
                _ => (E_IND[j - 3], j as i64),
            };
            ExpectedRow {
                degree: deg,
                n_factors: 1,
                depth: j,
                widths: if j <= 2 {
                    Some(vec![e_widths(j)])
                } else {
                    None
                },
                width_sum,
                ind_p: ind,
                delta_p: deg as i64 - 1,
                splitting: vec![(deg as i64, 1)],
            }
        }
    })
}

/// Slopes `h_i/e_i` of the successive levels of every E_j.
pub const E_SLOPES: [(i64, i64); 8] = [
    (1, 2),
    (3, 2),
    (2, 3),
    (2, 3),
    (1, 2),
    (1, 2),
    (1, 3),
    (1, 2),
];

fn e_widths(j: usize) -> Vec<i64> {
    E_SLOPES[..j].iter().map(|&(h, e)| ceil_div(h, e)).collect()
}

/// The row recomputed from the level data that defines each family member
/// (slopes, residual degrees and the width/depth definitions).
/// It differs from [`expected_invariants`] in two places:
/// * C: the last level of each factor has `e·f = 1` and degree equal to the
///   factor's degree, so it is not counted in the depth; widths are `(1, 1)`.
/// * E_j, j ≥ 2: the width vector `(⌈h_i/e_i⌉)` sums to `j + 1`, not `j`.
pub fn reconciled_invariants(spec: &FamilySpec) -> Result<ExpectedRow> {
    let mut row = expected_invariants(spec)?;
    match spec.family {
        Family::C => {
            row.depth = 2;
            row.widths = Some(vec![vec![1, 1]; 6]);
            row.width_sum = 12;
        }
        Family::E => {
            let j = spec.get("j")? as usize;
            let w = e_widths(j);
            row.width_sum = w.iter().sum();
            row.widths = Some(vec![w]);
        }
        _ => {}
    }
    Ok(row)
}

/// The CI grid of family members checked by the acceptance suite.
pub fn ci_grid() -> Vec<FamilySpec> {
    let mut out = Vec::new();
    for p in [5, 13] {
        for n in [2, 3, 4] {
            for k in [1, 2, 3, 5, 7] {
                for r in [0, 1] {
                    if let Ok(s) = FamilySpec::a(p, n, k, r) {
                        out.push(s);
                    }
                }
            }
        }
    }
    for m in [2, 3] {
        out.push(FamilySpec::am(7, 2, 3, m).expect("valid"));
    }
    for p in [7, 13] {
        for k in [2, 4, 5] {
            out.push(FamilySpec::b(p, k).expect("valid"));
        }
    }
    out.push(FamilySpec::c(17, 19).expect("valid"));
    for l in [5, 7] {
        for p in [2, 3] {
            for (n, k) in [(3, 2), (2, 3)] {
                out.push(FamilySpec::d(l, p, n, k).expect("valid"));
            }
        }
    }
    for j in 1..=5 {
        out.push(FamilySpec::e(5, j).expect("valid"));
    }
    out
}
