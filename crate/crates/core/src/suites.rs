//! Named timing sweeps behind the `bench` command, rendered as CSV.

use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::factor::{factor, FactorConfig};
use crate::hensel::hensel_lift;
use crate::montes::{montes, MontesConfig};
use crate::sfl::direct_sfl;
use crate::testpolys::{ci_grid, gen_family, Family, FamilySpec};
use crate::tower::seeded_rng;
use crate::zpoly::ZPoly;

pub const SUITES: [&str; 4] = ["E", "B", "D", "H"];

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub family: String,
    pub params: String,
    pub nu: u32,
    pub factors: usize,
    /// Main-loop passes summed over the factors.
    pub iterations: usize,
    /// Guaranteed slopes per pass, factors separated by `|`.
    pub h_trajectory: String,
    pub wall_ms: f64,
    /// Direct driver on the factors of order 0 (empty when there are none).
    pub direct_ms: Option<f64>,
    /// Quadratic Hensel lifting of the same factors.
    pub hensel_ms: Option<f64>,
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn params_of(spec: &FamilySpec) -> String {
    spec.params
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

/// Direct and Hensel timings over the unramified simple factors of f.
fn order0_timings(f: &ZPoly, p: u64, nu: u32, seed: u64) -> Result<(Option<f64>, Option<f64>)> {
    let out = montes(
        f,
        p,
        &MontesConfig {
            seed,
            ..Default::default()
        },
    )?;
    let bars: Vec<Vec<u64>> = out
        .factors
        .iter()
        .filter(|m| m.ty.order() == 0)
        .map(|m| m.phi.reduce_mod_p())
        .collect();
    if bars.is_empty() {
        return Ok((None, None));
    }
    let t = Instant::now();
    for b in &bars {
        direct_sfl(f, p, b, nu)?;
    }
    let direct = ms(t);
    let t = Instant::now();
    for b in &bars {
        hensel_lift(f, p, b, nu)?;
    }
    Ok((Some(direct), Some(ms(t))))
}

fn family_row(spec: &FamilySpec, nu: u32, seed: u64) -> Result<BenchRow> {
    let f = gen_family(spec)?;
    let cfg = FactorConfig {
        nu,
        seed,
        ..Default::default()
    };
    let t = Instant::now();
    let r = factor(&f, spec.prime(), &cfg)?;
    let wall_ms = ms(t);
    let (direct_ms, hensel_ms) = order0_timings(&f, spec.prime(), nu, seed)?;
    Ok(BenchRow {
        family: spec.family.name().to_string(),
        params: params_of(spec),
        nu,
        factors: r.n_factors,
        iterations: r.factors.iter().map(|g| g.h_trajectory.len()).sum(),
        h_trajectory: r
            .factors
            .iter()
            .map(|g| {
                g.h_trajectory
                    .iter()
                    .map(|h| h.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join("|"),
        wall_ms,
        direct_ms,
        hensel_ms,
    })
}

/// A random monic polynomial of degree `n` over Z whose reduction mod p is squarefree.
pub fn random_squarefree_mod_p<R: Rng>(rng: &mut R, p: u64, n: usize, coeff_digits: u32) -> ZPoly {
    let bound = crate::padic::p_pow(p, coeff_digits);
    let bound = bound
        .to_u64_digits()
        .1
        .first()
        .copied()
        .unwrap_or(u64::MAX)
        .min(1 << 40) as i64;
    loop {
        let mut c: Vec<i64> = (0..n).map(|_| rng.gen_range(0..bound)).collect();
        c.push(1);
        let f = ZPoly::from_i64s(&c);
        let fld = crate::tower::FFTowerField::prime(p);
        let fb: Vec<crate::tower::FFElem> = crate::padic::PadicPoly::from_zpoly(&f, p, 1)
            .reduce_mod_p()
            .into_iter()
            .map(crate::tower::FFElem::Prime)
            .collect();
        if fld.poly_gcd(&fb, &fld.poly_deriv(&fb)).len() == 1 {
            return f;
        }
    }
}

fn hensel_rows(seed: u64) -> Result<Vec<BenchRow>> {
    let mut rng = seeded_rng(seed);
    let mut rows = Vec::new();
    for (p, n, nu) in [
        (7u64, 8usize, 100u32),
        (7, 16, 100),
        (13, 32, 200),
        (101, 64, 200),
    ] {
        let f = random_squarefree_mod_p(&mut rng, p, n, 3);
        let t = Instant::now();
        let (direct_ms, hensel_ms) = order0_timings(&f, p, nu, seed)?;
        rows.push(BenchRow {
            family: "random".into(),
            params: format!("p={p};n={n}"),
            nu,
            factors: 0,
            iterations: 0,
            h_trajectory: String::new(),
            wall_ms: ms(t),
            direct_ms,
            hensel_ms,
        });
    }
    Ok(rows)
}

/// Runs one named suite: `E` (depth sweep), `B` (width sweep), `D` (factor
/// count sweep) or `H` (direct driver against Hensel lifting).
pub fn run_suite(name: &str, seed: u64) -> Result<Vec<BenchRow>> {
    match name {
        "E" => (1..=8)
            .map(|j| family_row(&FamilySpec::e(5, j)?, 20, seed))
            .collect(),
        "B" => [2, 4, 5, 7, 8]
            .iter()
            .map(|&k| family_row(&FamilySpec::b(7, k)?, 200, seed))
            .collect(),
        "D" => ci_grid()
            .into_iter()
            .filter(|s| s.family == Family::D)
            .map(|s| family_row(&s, 50, seed))
            .collect(),
        "H" => hensel_rows(seed),
        other => Err(Error::BadParams(format!(
            "unknown suite '{other}' (expected one of {})",
            SUITES.join(", ")
        ))),
    }
}

pub const CSV_HEADER: &str =
    "family,params,nu,factors,iterations,h_trajectory,wall_ms,direct_ms,hensel_ms";

pub fn to_csv(rows: &[BenchRow]) -> String {
    let opt = |x: Option<f64>| x.map(|v| format!("{v:.3}")).unwrap_or_default();
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{:.3},{},{}\n",
            r.family,
            r.params,
            r.nu,
            r.factors,
            r.iterations,
            r.h_trajectory,
            r.wall_ms,
            opt(r.direct_ms),
            opt(r.hensel_ms)
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn width_sweep_iterations_grow_with_k() {
        let rows = run_suite("B", 1).unwrap();
        assert_eq!(rows.len(), 5);
        assert!(rows.iter().all(|r| r.factors == 2));
        let csv = to_csv(&rows);
        assert_eq!(csv.lines().count(), 6);
    }

    #[test]
    fn hensel_suite_times_both_drivers() {
        let rows = run_suite("H", 3).unwrap();
        assert!(rows
            .iter()
            .all(|r| r.direct_ms.is_some() && r.hensel_ms.is_some()));
    }

    #[test]
    fn unknown_suite() {
        assert!(matches!(run_suite("Z", 1), Err(Error::BadParams(_))));
    }
}
