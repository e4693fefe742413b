//! The Montes loop: from a monic separable f, one f-complete optimal type per
//! irreducible p-adic factor, each with a Montes approximation attached.

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::omtype::{OMType, Val};
use crate::padic::{is_prime, PadicPoly};
use crate::polygon::principal_part;
use crate::tower::{seeded_rng, FFElem, FFTowerField};
use crate::zpoly::ZPoly;

/// Knobs for one factorization run.
#[derive(Clone, Debug)]
pub struct MontesConfig {
    /// Seed for the randomized residue-field factorizations.
    pub seed: u64,
    /// Starting working precision; `None` picks one from the input.
    pub initial_prec: Option<u32>,
    /// Maximum number of precision doublings.
    pub max_restarts: u32,
    /// Record one trace line per loop iteration.
    pub trace: bool,
}

impl Default for MontesConfig {
    fn default() -> Self {
        MontesConfig {
            seed: 1,
            initial_prec: None,
            max_restarts: 16,
            trace: false,
        }
    }
}

/// One f-complete type together with its Montes approximation φ_{r+1}.
#[derive(Clone, Debug)]
pub struct MontesFactor {
    pub ty: OMType,
    pub phi: PadicPoly,
    /// Slope of the length-one principal polygon of f with respect to φ
    /// (a lower bound when a_0 vanished at the working precision).
    pub h_phi: i64,
    pub h_phi_exact: bool,
}

#[derive(Clone, Debug)]
pub struct MontesOutput {
    pub factors: Vec<MontesFactor>,
    /// Working precision of the successful run.
    pub prec: u32,
    pub iterations: usize,
    pub restarts: u32,
    pub trace: Vec<String>,
}

impl MontesOutput {
    /// Σ of per-type indices is computed elsewhere; this is the degree check.
    pub fn total_degree(&self) -> usize {
        self.factors.iter().map(|f| f.ty.degree()).sum()
    }
}

/// h_φ = w(a_0) − w(a_1) − V for f = … + a_1 φ + a_0; the flag tells whether it is exact.
pub fn approximation_slope(t: &OMType, phi: &PadicPoly, f: &PadicPoly) -> Result<(i64, bool)> {
    let (q, a0) = f.quotrem(phi)?;
    let a1 = q.rem(phi)?;
    let big_v = t.big_v(t.order() + 1);
    let w1 = t.w(&a1)?.exact().ok_or(Error::NotARepresentative)?;
    match t.w(&a0)? {
        Val::Exact(w0) => {
            let h = w0 - w1 - big_v;
            if h <= 0 {
                return Err(Error::NotARepresentative);
            }
            Ok((h, true))
        }
        Val::AtLeast(b) => Ok(((b - w1 - big_v).max(1), false)),
    }
}

/// Starting precision: v_p(disc f) + deg f for small inputs, a fixed seed otherwise.
pub fn initial_precision(f: &ZPoly, p: u64) -> u32 {
    let n = f.degree().unwrap_or(0);
    if n <= 48 {
        if let Ok(v) = f.disc_valuation(p) {
            return (v as u32 + n as u32).max(8);
        }
    }
    64
}

/// Runs the Montes loop, doubling the working precision whenever a polygon is
/// not determined at the current one.
pub fn montes(f: &ZPoly, p: u64, cfg: &MontesConfig) -> Result<MontesOutput> {
    if !is_prime(p) {
        return Err(Error::BadPrime(p));
    }
    if !f.is_monic() {
        return Err(Error::NotMonic);
    }
    if f.degree().unwrap_or(0) == 0 {
        return Err(Error::EmptyInput);
    }
    if !f.is_separable() {
        return Err(Error::NotSeparable);
    }
    let mut prec = cfg.initial_prec.unwrap_or_else(|| initial_precision(f, p));
    let mut restarts = 0;
    loop {
        match montes_at(f, p, prec, cfg) {
            Ok(mut out) => {
                out.restarts = restarts;
                return Ok(out);
            }
            Err(Error::PrecisionExhausted(_)) if restarts < cfg.max_restarts => {
                restarts += 1;
                prec *= 2;
            }
            Err(e) => return Err(e),
        }
    }
}

struct Node {
    ty: OMType,
    mult: usize,
}

/// One attempt at a fixed working precision.
pub fn montes_at(f: &ZPoly, p: u64, prec: u32, cfg: &MontesConfig) -> Result<MontesOutput> {
    let fp = PadicPoly::from_zpoly(f, p, prec);
    let f0 = FFTowerField::prime(p);
    let fbar: Vec<FFElem> = fp.reduce_mod_p().into_iter().map(FFElem::Prime).collect();
    let mut rng = seeded_rng(cfg.seed);
    let mut out = MontesOutput {
        factors: vec![],
        prec,
        iterations: 0,
        restarts: 0,
        trace: vec![],
    };
    let mut stack: Vec<Node> = Vec::new();
    for (psi, mult) in f0.factor(&fbar, &mut rng).into_iter().rev() {
        stack.push(Node {
            ty: OMType::order_zero(p, prec, psi)?,
            mult,
        });
    }
    while let Some(node) = stack.pop() {
        out.iterations += 1;
        if node.mult == 1 {
            let t = node.ty;
            let phi = seal_representative(&t)?;
            let (h_phi, exact) = approximation_slope(&t, &phi, &fp)?;
            if cfg.trace {
                out.trace.push(format!(
                    "iter {}: complete order {} deg {} e {} f {} h_phi {}{}",
                    out.iterations,
                    t.order(),
                    t.degree(),
                    t.e(),
                    t.f(),
                    if exact { "" } else { ">=" },
                    h_phi
                ));
            }
            out.factors.push(MontesFactor {
                ty: t,
                phi,
                h_phi,
                h_phi_exact: exact,
            });
            continue;
        }
        let children = branch(
            &node,
            &fp,
            &mut rng,
            cfg.trace.then_some(&mut out.trace),
            out.iterations,
        )?;
        for c in children.into_iter().rev() {
            stack.push(c);
        }
    }
    let deg: usize = out.factors.iter().map(|m| m.ty.degree()).sum();
    if deg != f.degree().unwrap() {
        return Err(Error::PrecisionExhausted(prec));
    }
    Ok(out)
}

/// Representative of a type, refusing when the precision cannot hold it.
fn seal_representative(t: &OMType) -> Result<PadicPoly> {
    let r = t.order();
    let v_next = t.big_v(r + 1);
    if (t.prec() as i64) * t.e() <= v_next {
        return Err(Error::PrecisionExhausted(t.prec()));
    }
    t.representative()
}

fn branch(
    node: &Node,
    f: &PadicPoly,
    rng: &mut rand_chacha::ChaCha8Rng,
    trace: Option<&mut Vec<String>>,
    iter: usize,
) -> Result<Vec<Node>> {
    let t = &node.ty;
    let r = t.order();
    let a = node.mult;
    let mut phi = seal_representative(t)?;
    let refine = r > 0 && t.level(r).e as usize * t.level(r).f == 1;
    let (i, big_v) = if refine {
        (r, t.level(r).v)
    } else {
        (r + 1, t.big_v(r + 1))
    };
    let mut pts = t.newton_points(i, &phi, big_v, f, Some(a))?;
    if !pts[0].val.is_exact() {
        // φ divides f to the working precision. Adding p^c with v_i(p^c) > V_i
        // keeps φ a representative and makes the constant coefficient visible.
        let big_e = t.ram(i - 1);
        let c = (t.prec() as i64 / 2).max(big_v.div_euclid(big_e) + 1);
        phi = phi.add(&PadicPoly::constant(
            t.p(),
            t.prec(),
            crate::padic::p_pow(t.p(), c as u32),
        ));
        pts = t.newton_points(i, &phi, big_v, f, Some(a))?;
        if !pts[0].val.is_exact() {
            return Err(Error::PrecisionExhausted(t.prec()));
        }
    }
    let poly = OMType::polygon(&pts)?;
    if poly.dropped_may_interfere {
        return Err(Error::PrecisionExhausted(t.prec()));
    }
    let pp = principal_part(&poly);
    if pp.length() != a {
        return Err(Error::PrecisionExhausted(t.prec()));
    }
    let fi = t.field(i).clone();
    let mut children = Vec::new();
    let mut log = Vec::new();
    for side in &pp.sides {
        if refine {
            let old = t.level(r);
            if Rational64::new(side.h, side.e) <= Rational64::new(old.h, old.e) {
                return Err(Error::PrecisionExhausted(t.prec()));
            }
        }
        let rp = t.residual_from_points(i, &pts, side.h, side.e)?;
        let facs = fi.factor(&rp, rng);
        log.push(format!(
            "slope -{}/{} R deg {} -> [{}]",
            side.h,
            side.e,
            rp.len() - 1,
            facs.iter()
                .map(|(g, b)| format!("deg {}^{}", g.len() - 1, b))
                .collect::<Vec<_>>()
                .join(", ")
        ));
        for (psi, b) in facs {
            let child = if refine {
                t.refine(phi.clone(), side.h, side.e, psi)?
            } else {
                t.extend(phi.clone(), side.h, side.e, psi)?
            };
            children.push(Node { ty: child, mult: b });
        }
    }
    if let Some(tr) = trace {
        tr.push(format!(
            "iter {}: {} level {} deg phi {} mult {} sides {}",
            iter,
            if refine { "refine" } else { "extend" },
            i,
            phi.degree().unwrap_or(0),
            a,
            log.join("; ")
        ));
    }
    Ok(children)
}
