//! Depth, width, index, exponent and splitting data read off a sealed type.

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::omtype::OMType;
use crate::testpolys::splitting_string;

/// Per-factor invariants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub degree: usize,
    pub depth: usize,
    pub width: Vec<i64>,
    pub width_sum: i64,
    pub index: i64,
    pub exponent: i64,
    pub e: i64,
    pub f: i64,
    /// ν₀ as "num/den".
    pub nu0: String,
    pub splitting_entry: String,
}

/// Depth: r, or r−1 when the last level has e_r f_r = 1.
pub fn okutsu_depth(t: &OMType) -> usize {
    t.depth()
}

/// `(⌈h_i/e_i⌉)` for the levels counted by the depth.
pub fn okutsu_width(t: &OMType) -> Vec<i64> {
    (1..=okutsu_depth(t))
        .map(|i| Integer::div_ceil(&t.level(i).h, &t.level(i).e))
        .collect()
}

/// ν₀ = Σ_{i ≤ r} h_i / (e_1⋯e_i).
pub fn nu0_of(t: &OMType) -> Rational64 {
    (1..=t.order())
        .map(|i| Rational64::new(t.level(i).h, t.ram(i)))
        .sum()
}

/// Index of the factor singled out by `t`:
/// (deg F / 2)·Σ_i (1/(e_1⋯e_{i−1}))·((h_i/e_i)(deg F/m_i − 1) − (e_i − 1)/e_i).
pub fn index_of(t: &OMType) -> Result<i64> {
    let n = t.degree() as i64;
    let mut acc = Rational64::zero();
    for i in 1..=t.order() {
        let l = t.level(i);
        let term = Rational64::new(l.h, l.e) * Rational64::from_integer(n / l.m as i64 - 1)
            - Rational64::new(l.e - 1, l.e);
        acc += term / Rational64::from_integer(t.ram(i - 1));
    }
    let ind = acc * Rational64::new(n, 2);
    if !ind.is_integer() || ind < Rational64::zero() {
        return Err(Error::NonIntegralIndex);
    }
    Ok(ind.to_integer())
}

/// exp(F) = ⌊V_{r+1}/e − ν₀⌋.
pub fn exponent_of(t: &OMType) -> i64 {
    let mu = Rational64::new(t.big_v(t.order() + 1), t.e()) - nu0_of(t);
    mu.floor().to_integer().max(0)
}

pub fn invariant_report(t: &OMType) -> Result<InvariantReport> {
    let width = okutsu_width(t);
    let nu0 = nu0_of(t);
    Ok(InvariantReport {
        degree: t.degree(),
        depth: okutsu_depth(t),
        width_sum: width.iter().sum(),
        width,
        index: index_of(t)?,
        exponent: exponent_of(t),
        e: t.e(),
        f: t.f() as i64,
        nu0: format!("{}/{}", nu0.numer(), nu0.denom()),
        splitting_entry: splitting_string(&[(t.e(), t.f() as i64)]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montes::{montes, MontesConfig};
    use crate::zpoly::ZPoly;

    fn only_type(f: &ZPoly, p: u64) -> OMType {
        let out = montes(f, p, &MontesConfig::default()).unwrap();
        assert_eq!(out.factors.len(), 1);
        out.factors[0].ty.clone()
    }

    #[test]
    fn eisenstein() {
        let t = only_type(&ZPoly::from_i64s(&[5, 0, 1]), 5);
        assert_eq!(okutsu_depth(&t), 1);
        assert_eq!(okutsu_width(&t), vec![1]);
        assert_eq!(nu0_of(&t), Rational64::new(1, 2));
        assert_eq!(index_of(&t).unwrap(), 0);
        assert_eq!(exponent_of(&t), 0);
    }

    #[test]
    fn pure_cube_root_of_p_cubed() {
        // x² + 5³: slope 3/2, index 1, exponent ⌊3 − 3/2⌋ = 1
        let t = only_type(&ZPoly::from_i64s(&[125, 0, 1]), 5);
        assert_eq!(okutsu_width(&t), vec![2]);
        assert_eq!(nu0_of(&t), Rational64::new(3, 2));
        assert_eq!(index_of(&t).unwrap(), 1);
        assert_eq!(exponent_of(&t), 1);
        let r = invariant_report(&t).unwrap();
        assert_eq!(r.splitting_entry, "𝔭^2");
    }

    #[test]
    fn unramified_factor() {
        // x² + x + 1 is irreducible mod 2: order-0 type, depth 0
        let t = only_type(&ZPoly::from_i64s(&[1, 1, 1]), 2);
        assert_eq!(okutsu_depth(&t), 0);
        assert!(okutsu_width(&t).is_empty());
        assert_eq!(nu0_of(&t), Rational64::zero());
        assert_eq!(index_of(&t).unwrap(), 0);
        assert_eq!(exponent_of(&t), 0);
        assert_eq!(invariant_report(&t).unwrap().splitting_entry, "𝔭_2");
    }
}
