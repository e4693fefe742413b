//! Full factorization: Montes types, lifted factors, invariants and the
//! discriminant ledger of one polynomial.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariants::{invariant_report, InvariantReport};
use crate::montes::{montes, MontesConfig, MontesFactor, MontesOutput};
use crate::padic::{val_p, PadicPoly};
use crate::sfl::{direct_sfl, sfl_lift_with, LiftOptions, LiftOutcome, PrecisionMode, Variant};
use crate::testpolys::{splitting_string, ExpectedRow};
use crate::zpoly::ZPoly;

/// Version of the JSON layout of [`FactorReport`].
pub const SCHEMA_VERSION: u32 = 1;

/// Up to this degree the discriminant valuation comes from the exact integer
/// resultant; above it, tamely ramified inputs use the index instead.
pub const EXACT_DISC_DEGREE: usize = 128;

#[derive(Clone, Debug)]
pub struct FactorConfig {
    /// Target precision ν: factors are returned modulo p^ν.
    pub nu: u32,
    pub variant: Variant,
    pub precision: PrecisionMode,
    /// Lift factors whose type has order 0 with the direct driver.
    pub direct: bool,
    /// Seed of the residue-field factorizations.
    pub seed: u64,
    /// Keep the Montes trace lines in the report.
    pub trace: bool,
    /// Lift factors on the rayon pool (ignored without the `parallel` feature).
    pub parallel: bool,
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig {
            nu: 10,
            variant: Variant::Warmup,
            precision: PrecisionMode::Production,
            direct: false,
            seed: 1,
            trace: false,
            parallel: true,
        }
    }
}

/// One lifted factor.
#[derive(Clone, Debug, Serialize)]
pub struct FactorEntry {
    /// Canonical representatives modulo p^ν, constant first, as decimal strings.
    pub coeffs: Vec<String>,
    pub degree: usize,
    pub invariants: InvariantReport,
    /// "sfl" or "direct".
    pub driver: &'static str,
    /// Guaranteed slope after each pass.
    pub h_trajectory: Vec<i64>,
    pub quotrems: usize,
    #[serde(skip)]
    pub phi: PadicPoly,
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorReport {
    pub schema_version: u32,
    pub prime: u64,
    pub precision: u32,
    pub input: Vec<String>,
    pub degree: usize,
    pub disc_valuation: u64,
    /// "resultant" (exact integer discriminant) or "tame" (from the index and
    /// the ramification data, used for large tamely ramified inputs).
    pub disc_source: &'static str,
    pub factors: Vec<FactorEntry>,
    pub n_factors: usize,
    /// Maximum depth over the factors.
    pub depth: usize,
    pub width_sum: i64,
    /// Σ of the per-factor indices.
    pub index_factors: i64,
    /// Σ_{i<j} v_p(Res(F_i, F_j)).
    pub index_cross: i64,
    /// v_p of the index of Z_p[x]/(f) in its maximal order.
    pub index: i64,
    /// disc_valuation − 2·index: the valuation of the discriminant of the étale algebra.
    pub delta: i64,
    pub splitting: String,
    /// Whether the product of the factors is congruent to f modulo p^ν.
    pub product_check: bool,
    pub montes_precision: u32,
    pub montes_restarts: u32,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<String>,
}

impl FactorReport {
    /// The report in the shape of an expected family row.
    pub fn as_row(&self) -> ExpectedRow {
        let mut splitting: Vec<(i64, i64)> = self
            .factors
            .iter()
            .map(|g| (g.invariants.e, g.invariants.f))
            .collect();
        splitting.sort();
        ExpectedRow {
            degree: self.degree,
            n_factors: self.n_factors,
            depth: self.depth,
            widths: Some(
                self.factors
                    .iter()
                    .map(|g| g.invariants.width.clone())
                    .collect(),
            ),
            width_sum: self.width_sum,
            ind_p: self.index,
            delta_p: self.delta,
            splitting,
        }
    }
}

/// Lifts one Montes factor to precision `nu`.
pub fn lift_factor(
    f: &ZPoly,
    m: &MontesFactor,
    nu: u32,
    cfg: &FactorConfig,
) -> Result<(PadicPoly, &'static str, Vec<i64>, usize)> {
    if cfg.direct && m.ty.order() == 0 {
        let p = m.ty.p();
        let phibar = m.phi.reduce_mod_p();
        let g = direct_sfl(f, p, &phibar, nu)?;
        return Ok((g, "direct", Vec::new(), 0));
    }
    let opts = LiftOptions {
        variant: cfg.variant,
        precision: cfg.precision,
        measure: false,
    };
    let LiftOutcome {
        phi,
        records,
        quotrems,
        ..
    } = sfl_lift_with(f, &m.ty, &m.phi, nu, &opts, None)?;
    Ok((phi, "sfl", records.iter().map(|r| r.h).collect(), quotrems))
}

type Lifted = (PadicPoly, &'static str, Vec<i64>, usize);

/// Lifts every factor one after the other.
pub fn lift_all_sequential(
    f: &ZPoly,
    out: &MontesOutput,
    nu: u32,
    cfg: &FactorConfig,
) -> Result<Vec<Lifted>> {
    out.factors
        .iter()
        .map(|m| lift_factor(f, m, nu, cfg))
        .collect()
}

/// Lifts the factors on the rayon pool; the order of the result is the factor order.
#[cfg(feature = "parallel")]
pub fn lift_all_parallel(
    f: &ZPoly,
    out: &MontesOutput,
    nu: u32,
    cfg: &FactorConfig,
) -> Result<Vec<Lifted>> {
    use rayon::prelude::*;
    out.factors
        .par_iter()
        .map(|m| lift_factor(f, m, nu, cfg))
        .collect()
}

fn lift_all(f: &ZPoly, out: &MontesOutput, nu: u32, cfg: &FactorConfig) -> Result<Vec<Lifted>> {
    #[cfg(feature = "parallel")]
    if cfg.parallel && out.factors.len() > 1 {
        return lift_all_parallel(f, out, nu, cfg);
    }
    lift_all_sequential(f, out, nu, cfg)
}

/// Σ_{i<j} v_p(Res(F_i, F_j)) from approximations modulo p^N; `None` when
/// some resultant is not determined at that precision.
fn cross_index(lifts: &[ZPoly], p: u64, digits: u32) -> Option<i64> {
    let mut total = 0i64;
    for i in 0..lifts.len() {
        for j in i + 1..lifts.len() {
            let r = ZPoly::resultant(&lifts[i], &lifts[j]);
            if r.is_zero() {
                return None;
            }
            let v = val_p(&r, p, digits);
            if v >= digits {
                return None;
            }
            total += v as i64;
        }
    }
    Some(total)
}

/// Product of the factors compared with f modulo p^ν.
pub fn product_matches(f: &ZPoly, factors: &[PadicPoly], p: u64, nu: u32) -> bool {
    let prod = factors.iter().fold(PadicPoly::one(p, nu), |acc, g| {
        acc.mul(&g.truncate(nu)).truncate(nu)
    });
    prod.eq_mod(&PadicPoly::from_zpoly(f, p, nu), nu)
}

fn digit_strings(c: &[BigInt]) -> Vec<String> {
    c.iter().map(|x| x.to_string()).collect()
}

/// Factors `f` over Z_p to precision `cfg.nu` and reports the invariants.
pub fn factor(f: &ZPoly, p: u64, cfg: &FactorConfig) -> Result<FactorReport> {
    if cfg.nu == 0 {
        return Err(Error::BadParams("precision must be at least 1".into()));
    }
    let mcfg = MontesConfig {
        seed: cfg.seed,
        trace: cfg.trace,
        ..Default::default()
    };
    let out = montes(f, p, &mcfg)?;
    let lifted = lift_all(f, &out, cfg.nu, cfg)?;

    let invariants = out
        .factors
        .iter()
        .map(|m| invariant_report(&m.ty))
        .collect::<Result<Vec<_>>>()?;
    let index_factors: i64 = invariants.iter().map(|r| r.index).sum();
    let degree = f.degree().unwrap_or(0);
    let tame = invariants.iter().all(|r| r.e % p as i64 != 0);
    let exact_disc = if degree <= EXACT_DISC_DEGREE || !tame {
        Some(f.disc_valuation(p)?)
    } else {
        None
    };

    // cross terms: the resultants are determined once the lifts are more
    // precise than their valuations, which are bounded by v_p(disc f)
    let index_cross = if out.factors.len() < 2 {
        0
    } else {
        let mut digits = cfg.nu.max(exact_disc.map_or(0, |d| d as u32 + 1));
        loop {
            let lifts: Vec<ZPoly> = if digits == cfg.nu {
                lifted.iter().map(|l| l.0.to_zpoly()).collect()
            } else {
                lift_all(f, &out, digits, cfg)?
                    .iter()
                    .map(|l| l.0.to_zpoly())
                    .collect()
            };
            if let Some(c) = cross_index(&lifts, p, digits) {
                break c;
            }
            digits *= 2;
        }
    };
    let index = index_factors + index_cross;
    // tamely ramified algebra: v_p(disc L) = f·(e − 1) for every factor
    let (disc_valuation, disc_source) = match exact_disc {
        Some(d) => (d, "resultant"),
        None => (
            (2 * index + invariants.iter().map(|r| r.f * (r.e - 1)).sum::<i64>()) as u64,
            "tame",
        ),
    };

    let phis: Vec<PadicPoly> = lifted.iter().map(|l| l.0.clone()).collect();
    let product_check = product_matches(f, &phis, p, cfg.nu);
    let mut splitting: Vec<(i64, i64)> = invariants.iter().map(|r| (r.e, r.f)).collect();
    splitting.sort();

    let factors: Vec<FactorEntry> = lifted
        .into_iter()
        .zip(invariants)
        .map(|((phi, driver, h_trajectory, quotrems), inv)| FactorEntry {
            coeffs: digit_strings(&phi.residues(cfg.nu)),
            degree: inv.degree,
            invariants: inv,
            driver,
            h_trajectory,
            quotrems,
            phi,
        })
        .collect();
    Ok(FactorReport {
        schema_version: SCHEMA_VERSION,
        prime: p,
        precision: cfg.nu,
        input: digit_strings(f.coeffs()),
        degree,
        disc_valuation,
        disc_source,
        n_factors: factors.len(),
        depth: factors
            .iter()
            .map(|g| g.invariants.depth)
            .max()
            .unwrap_or(0),
        width_sum: factors.iter().map(|g| g.invariants.width_sum).sum(),
        index_factors,
        index_cross,
        index,
        delta: disc_valuation as i64 - 2 * index,
        splitting: splitting_string(&splitting),
        product_check,
        montes_precision: out.prec,
        montes_restarts: out.restarts,
        trace: out.trace,
        factors,
    })
}

/// Whether `factors` multiply to `f` modulo p^ν, bit for bit on canonical residues.
pub fn verify(f: &ZPoly, factors: &[ZPoly], p: u64, nu: u32) -> bool {
    let phis: Vec<PadicPoly> = factors
        .iter()
        .map(|g| PadicPoly::from_zpoly(g, p, nu))
        .collect();
    product_matches(f, &phis, p, nu)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eisenstein_is_its_own_factor() {
        let f = ZPoly::from_i64s(&[5, 0, 1]);
        let r = factor(&f, 5, &FactorConfig::default()).unwrap();
        assert_eq!(r.n_factors, 1);
        assert_eq!(r.factors[0].coeffs, vec!["5", "0", "1"]);
        assert!(r.product_check);
        assert_eq!((r.index, r.delta), (0, 1));
    }

    #[test]
    fn cross_resultants_enter_the_index() {
        // (x² + 5)(x² + 130): Res = 125², each factor has index 0
        let f = ZPoly::from_i64s(&[5, 0, 1]).mul(&ZPoly::from_i64s(&[130, 0, 1]));
        let r = factor(&f, 5, &FactorConfig::default()).unwrap();
        assert_eq!(r.n_factors, 2);
        assert_eq!(r.index_factors, 0);
        assert_eq!(r.index_cross, 6);
        assert_eq!(r.delta, 2);
        assert!(r.product_check);
    }

    #[test]
    fn direct_driver_for_unramified_factors() {
        let f = ZPoly::from_i64s(&[-6, 11, -6, 1]);
        let cfg = FactorConfig {
            direct: true,
            nu: 30,
            ..Default::default()
        };
        let r = factor(&f, 7, &cfg).unwrap();
        assert!(r.factors.iter().all(|g| g.driver == "direct"));
        assert!(r.product_check);
    }

    #[test]
    fn verify_detects_a_perturbed_factor() {
        let f = ZPoly::from_i64s(&[5, 0, 1]);
        assert!(verify(&f, std::slice::from_ref(&f), 5, 10));
        assert!(!verify(&f, &[ZPoly::from_i64s(&[10, 0, 1])], 5, 10));
    }
}
