//! OM types: the layered data `(φ_i, λ_i, ψ_i)`, the valuations `v_i`, residues,
//! residual polynomials, and the polynomials constructed from prescribed residues.
//!
//! Valuations are integer-normalized: `v_1` is the Gauss valuation and
//! `v_{i+1}(g) = min_s(e_i·v_i(a_s) + s·(e_i·V_i + h_i))` over the φ_i-expansion,
//! so `v_i(p) = e_1⋯e_{i-1}`. Residues are read through the monomials
//! `π_i` (with `v_i(π_i) = 1`) and `Y_i = φ_i^{e_i}/π_i^{e_iV_i+h_i}` whose
//! residue is the generator `z_i` of `F_{i+1}`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{p_pow, PadicPoly};
use crate::polygon::{lower_hull, NewtonPolygon, PolygonPoint};
use crate::tower::{FFElem, FFPoly, FFTowerField, Field};

/// Exponents of monomials over (p, φ_1, φ_2, …). They are products of level
/// data and grow quickly with the depth, so they are kept wide and checked.
pub type Exp = i128;

fn exp_mul(a: Exp, b: Exp) -> Result<Exp> {
    a.checked_mul(b).ok_or(Error::ExponentOverflow)
}

fn exp_add(a: Exp, b: Exp) -> Result<Exp> {
    a.checked_add(b).ok_or(Error::ExponentOverflow)
}

/// A valuation known exactly, or only bounded below at the working precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Val {
    Exact(i64),
    AtLeast(i64),
}

impl Val {
    pub fn exact(self) -> Option<i64> {
        match self {
            Val::Exact(v) => Some(v),
            Val::AtLeast(_) => None,
        }
    }

    /// The value, or its lower bound.
    pub fn bound(self) -> i64 {
        match self {
            Val::Exact(v) | Val::AtLeast(v) => v,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Val::Exact(_))
    }

    /// `a·self + b` for `a > 0`.
    pub fn affine(self, a: i64, b: i64) -> Val {
        match self {
            Val::Exact(v) => Val::Exact(a * v + b),
            Val::AtLeast(v) => Val::AtLeast(a.saturating_mul(v).saturating_add(b)),
        }
    }

    pub fn require(self) -> Result<i64> {
        match self {
            Val::Exact(v) => Ok(v),
            Val::AtLeast(v) => Err(Error::PrecisionExhausted(v.clamp(0, u32::MAX as i64) as u32)),
        }
    }
}

/// Minimum of several values: exact only when an exact value lies strictly
/// below every unknown bound.
pub fn val_min(vals: impl IntoIterator<Item = Val>) -> Val {
    let mut ex: Option<i64> = None;
    let mut lo: Option<i64> = None;
    for v in vals {
        match v {
            Val::Exact(x) => ex = Some(ex.map_or(x, |e| e.min(x))),
            Val::AtLeast(x) => lo = Some(lo.map_or(x, |l| l.min(x))),
        }
    }
    match (ex, lo) {
        (Some(x), None) => Val::Exact(x),
        (Some(x), Some(l)) if x < l => Val::Exact(x),
        (Some(x), Some(l)) => Val::AtLeast(x.min(l)),
        (None, Some(l)) => Val::AtLeast(l),
        (None, None) => Val::AtLeast(i64::MAX),
    }
}

/// One sealed level `i ≥ 1` of a type.
#[derive(Clone, Debug)]
pub struct TypeLevel {
    /// φ_i, monic with exact integer coefficients.
    pub phi: PadicPoly,
    pub m: usize,
    /// V_i = v_i(φ_i).
    pub v: i64,
    pub h: i64,
    pub e: i64,
    pub f: usize,
    /// ψ_i over F_i.
    pub psi: FFPoly,
    /// ℓ_i ∈ [0, e_i) with ℓ_i·h_i ≡ 1 (mod e_i).
    pub ell: i64,
    /// π_i as exponents over (p, φ_1, …, φ_{i-1}); v_i(π_i) = 1.
    pub pi_exps: Vec<Exp>,
    /// Y_i = φ_i^{e_i} / π_i^{e_iV_i+h_i} as exponents over (p, φ_1, …, φ_i);
    /// v_{i+1}(Y_i) = 0 and its residue is z_i.
    pub phi_exps: Vec<Exp>,
}

impl TypeLevel {
    /// e_i·V_i + h_i, the v_{i+1}-value of φ_i.
    pub fn w(&self) -> i64 {
        self.e * self.v + self.h
    }

    pub fn slope(&self) -> Rational64 {
        Rational64::new(-self.h, self.e)
    }
}

/// A coefficient of a φ-expansion together with its polygon data.
#[derive(Clone, Debug)]
pub struct PhiPoint {
    pub s: usize,
    /// v_i(a_s).
    pub val: Val,
    /// v_i(a_s φ^s) = v_i(a_s) + s·V.
    pub ord: Val,
    /// Residue of a_s in F_i when its value is exact.
    pub res: Option<FFElem>,
}

/// An OM type of order r: ψ_0 over F_p and sealed levels 1..=r.
#[derive(Clone, Debug)]
pub struct OMType {
    p: u64,
    prec: u32,
    psi0: FFPoly,
    /// F_0, F_1, …, F_{r+1}.
    fields: Vec<Field>,
    levels: Vec<TypeLevel>,
}

#[derive(Serialize)]
struct LevelDump {
    m: usize,
    h: i64,
    e: i64,
    f: usize,
    #[serde(rename = "V")]
    v: i64,
    psi: FFPoly,
    slope: String,
    phi: Vec<String>,
}

#[derive(Serialize)]
struct TypeDump {
    p: u64,
    order: usize,
    psi0: FFPoly,
    f0: usize,
    levels: Vec<LevelDump>,
}

fn mod_inverse(h: i64, e: i64) -> i64 {
    if e == 1 {
        return 0;
    }
    let g = h.extended_gcd(&e);
    debug_assert_eq!(g.gcd, 1);
    g.x.mod_floor(&e)
}

impl OMType {
    /// Order-0 type from a monic irreducible factor ψ_0 of f̄.
    pub fn order_zero(p: u64, prec: u32, psi0: FFPoly) -> Result<Self> {
        let f0 = FFTowerField::prime(p);
        let f1 = f0.extend(&psi0)?;
        Ok(OMType {
            p,
            prec,
            psi0,
            fields: vec![f0, f1],
            levels: vec![],
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn order(&self) -> usize {
        self.levels.len()
    }

    pub fn psi0(&self) -> &FFPoly {
        &self.psi0
    }

    pub fn f0(&self) -> usize {
        self.psi0.len() - 1
    }

    /// Level `i`, 1-based.
    pub fn level(&self, i: usize) -> &TypeLevel {
        &self.levels[i - 1]
    }

    pub fn levels(&self) -> &[TypeLevel] {
        &self.levels
    }

    /// F_i for 0 ≤ i ≤ r+1.
    pub fn field(&self, i: usize) -> &Field {
        &self.fields[i]
    }

    /// The residue field F_{r+1}.
    pub fn top_field(&self) -> &Field {
        self.fields.last().unwrap()
    }

    /// e_1⋯e_i (1 for i = 0).
    pub fn ram(&self, i: usize) -> i64 {
        self.levels[..i].iter().map(|l| l.e).product()
    }

    /// e = e_1⋯e_r.
    pub fn e(&self) -> i64 {
        self.ram(self.order())
    }

    /// f = f_0 f_1 ⋯ f_r.
    pub fn f(&self) -> usize {
        self.f0() * self.levels.iter().map(|l| l.f).product::<usize>()
    }

    /// m_i for 1 ≤ i ≤ r+1.
    pub fn m(&self, i: usize) -> usize {
        if i <= self.order() {
            self.level(i).m
        } else if i == 1 {
            self.f0()
        } else {
            let l = self.level(i - 1);
            l.m * l.e as usize * l.f
        }
    }

    /// V_i for 1 ≤ i ≤ r+1.
    pub fn big_v(&self, i: usize) -> i64 {
        if i <= self.order() {
            self.level(i).v
        } else if i == 1 {
            0
        } else {
            let l = self.level(i - 1);
            l.e * l.f as i64 * l.w()
        }
    }

    /// Degree of the factor singled out by the type, m_{r+1}.
    pub fn degree(&self) -> usize {
        self.m(self.order() + 1)
    }

    /// Okutsu depth: r, or r−1 when the last level has e_r f_r = 1.
    pub fn depth(&self) -> usize {
        match self.levels.last() {
            Some(l) if l.e as usize * l.f == 1 => self.order() - 1,
            _ => self.order(),
        }
    }

    /// Same type with every φ_i re-read at another working precision.
    pub fn with_prec(&self, prec: u32) -> Self {
        let mut t = self.clone();
        t.prec = prec;
        for l in &mut t.levels {
            l.phi = l.phi.at_prec(prec);
        }
        t
    }

    /// π_i as an exponent vector of length i.
    pub fn pi_vec(&self, i: usize) -> Result<Vec<Exp>> {
        let mut pi: Vec<Exp> = vec![1];
        for k in 1..i {
            let l = self.level(k);
            let b = Exp::from((1 - l.ell * l.w()) / l.e);
            let mut nv = pi
                .iter()
                .map(|&x| exp_mul(x, b))
                .collect::<Result<Vec<_>>>()?;
            nv.push(l.ell.into());
            pi = nv;
        }
        Ok(pi)
    }

    /// v_i of a monomial over (p, φ_1, …) with i ≤ r+1.
    pub fn monomial_value(&self, i: usize, mu: &[Exp]) -> Result<Exp> {
        // v_i(p) = E_{i-1}; v_i(φ_j) = (e_j V_j + h_j)·e_{j+1}⋯e_{i-1} for j < i.
        let mut total = exp_mul(mu.first().copied().unwrap_or(0), self.ram(i - 1).into())?;
        for j in 1..i {
            let ex = mu.get(j).copied().unwrap_or(0);
            if ex != 0 {
                let scale: i64 = self.levels[j..i - 1].iter().map(|l| l.e).product();
                total = exp_add(
                    total,
                    exp_mul(exp_mul(ex, self.level(j).w().into())?, scale.into())?,
                )?;
            }
        }
        Ok(total)
    }

    /// Residue in F_i of a monomial of v_i-value 0.
    pub fn monores(&self, i: usize, mu: &[Exp]) -> Result<FFElem> {
        let fi = &self.fields[i];
        if i == 1 {
            debug_assert!(mu.iter().all(|&x| x == 0), "monomial of nonzero value");
            return Ok(fi.one());
        }
        let k = i - 1;
        let l = self.level(k);
        let num = mu.get(k).copied().unwrap_or(0);
        let e = Exp::from(l.e);
        if num % e != 0 {
            return Err(Error::Infeasible(i64::try_from(num).unwrap_or(i64::MAX)));
        }
        let q = num / e;
        let qw = exp_mul(q, l.w().into())?;
        let pik = self.pi_vec(k)?;
        let mut rest: Vec<Exp> = (0..k).map(|j| mu.get(j).copied().unwrap_or(0)).collect();
        for j in 0..k {
            rest[j] = exp_add(rest[j], exp_mul(qw, pik[j])?)?;
        }
        let inner = self.monores(k, &rest)?;
        let zq = fi.pow_int(&fi.gen(), q)?;
        Ok(fi.mul(&zq, &fi.embed_base(&inner)))
    }

    fn val_res1(&self, g: &PadicPoly, want: bool) -> (Val, Option<FFElem>) {
        match g.v1() {
            None => (Val::AtLeast(g.abs_prec()), None),
            Some(v) => {
                if !want {
                    return (Val::Exact(v), None);
                }
                let d = p_pow(self.p, (v + g.den() as i64) as u32);
                let pb = BigInt::from(self.p);
                let f0 = &self.fields[0];
                let coords: Vec<FFElem> = g
                    .coeffs()
                    .iter()
                    .map(|c| f0.from_u64((c / &d).mod_floor(&pb).to_u64().unwrap()))
                    .collect();
                (Val::Exact(v), Some(self.fields[1].from_coords(coords)))
            }
        }
    }

    /// v_i(g) for 1 ≤ i ≤ r+1 and, when `want` and deg g < m_i, the residue of g in F_i.
    pub fn val_res(&self, i: usize, g: &PadicPoly, want: bool) -> Result<(Val, Option<FFElem>)> {
        if i == 1 {
            return Ok(self.val_res1(g, want));
        }
        let k = i - 1;
        let l = self.level(k);
        let w = l.w();
        let coeffs = g.phi_expansion(&l.phi)?;
        let want = want && coeffs.len() <= l.e as usize * l.f;
        let mut data = Vec::with_capacity(coeffs.len());
        for (s, a) in coeffs.iter().enumerate() {
            let (v, r) = self.val_res(k, a, want)?;
            data.push((v.affine(l.e, s as i64 * w), v, r));
        }
        let total = val_min(data.iter().map(|d| d.0));
        let Val::Exact(tv) = total else {
            return Ok((total, None));
        };
        if !want {
            return Ok((total, None));
        }
        let on: Vec<usize> = (0..data.len())
            .filter(|&s| data[s].0 == Val::Exact(tv))
            .collect();
        let s0 = on[0];
        let fi = &self.fields[i];
        let z = fi.gen();
        let mut acc = fi.zero();
        let mut zp = fi.one();
        let mut s = s0;
        while s < data.len() {
            if data[s].0 == Val::Exact(tv) {
                let r = data[s].2.as_ref().expect("residue of exact coefficient");
                acc = fi.add(&acc, &fi.mul(&zp, &fi.embed_base(r)));
            }
            zp = fi.mul(&zp, &z);
            s += l.e as usize;
        }
        let v0 = data[s0].1.exact().unwrap();
        let mono = self.twist_monomial(i, s0 as i64, v0, tv)?;
        let tw = self.monores(i, &mono)?;
        Ok((total, Some(fi.mul(&acc, &tw))))
    }

    /// φ_k^{s0} π_k^{u0} / π_i^{u}, k = i−1.
    fn twist_monomial(&self, i: usize, s0: i64, u0: i64, u: i64) -> Result<Vec<Exp>> {
        let k = i - 1;
        let pik = self.pi_vec(k)?;
        let pii = self.pi_vec(i)?;
        let mut mono: Vec<Exp> = vec![0; i];
        for (j, &x) in pik.iter().enumerate() {
            mono[j] = exp_add(mono[j], exp_mul(u0.into(), x)?)?;
        }
        mono[k] = exp_add(mono[k], s0.into())?;
        for (j, &x) in pii.iter().enumerate() {
            mono[j] = exp_add(mono[j], exp_mul(Exp::from(-u), x)?)?;
        }
        Ok(mono)
    }

    /// v_i(g) for any g.
    pub fn val(&self, i: usize, g: &PadicPoly) -> Result<Val> {
        Ok(self.val_res(i, g, false)?.0)
    }

    /// w = v_{r+1}.
    pub fn w(&self, g: &PadicPoly) -> Result<Val> {
        self.val(self.order() + 1, g)
    }

    /// Residue in F_i of g with deg g < m_i (None when g vanishes at the working precision).
    pub fn residue(&self, i: usize, g: &PadicPoly) -> Result<Option<FFElem>> {
        Ok(self.val_res(i, g, true)?.1)
    }

    /// The points (s, v_i(a_s φ^s)) of the φ-expansion of `g`, where φ plays
    /// the role of φ_i with v_i(φ) = `big_v`; only s ≤ `limit` when given.
    pub fn newton_points(
        &self,
        i: usize,
        phi: &PadicPoly,
        big_v: i64,
        g: &PadicPoly,
        limit: Option<usize>,
    ) -> Result<Vec<PhiPoint>> {
        let coeffs = g.phi_expansion(phi)?;
        let n = limit.map_or(coeffs.len(), |l| (l + 1).min(coeffs.len()));
        let mut pts = Vec::with_capacity(n);
        for (s, a) in coeffs.iter().take(n).enumerate() {
            let (val, res) = self.val_res(i, a, true)?;
            pts.push(PhiPoint {
                s,
                val,
                ord: val.affine(1, s as i64 * big_v),
                res,
            });
        }
        Ok(pts)
    }

    /// Lower hull of the points; ⊥ coefficients enter with their lower bounds.
    pub fn polygon(pts: &[PhiPoint]) -> Result<NewtonPolygon> {
        let pp: Vec<PolygonPoint> = pts
            .iter()
            .map(|pt| match pt.ord {
                Val::Exact(u) => PolygonPoint::new(pt.s, u),
                Val::AtLeast(b) => PolygonPoint::unknown(pt.s, Some(b)),
            })
            .collect();
        lower_hull(&pp)
    }

    /// Residual polynomial over F_i attached to the side of slope −h/e.
    pub fn residual_from_points(
        &self,
        i: usize,
        pts: &[PhiPoint],
        h: i64,
        e: i64,
    ) -> Result<FFPoly> {
        let key = |pt: &PhiPoint| pt.ord.affine(e, h * pt.s as i64);
        let min = val_min(pts.iter().map(key));
        let mv = min.require()?;
        let on: Vec<usize> = pts
            .iter()
            .filter(|pt| key(pt) == Val::Exact(mv))
            .map(|pt| pt.s)
            .collect();
        let (s0, s1) = (on[0], *on.last().unwrap());
        let fi = &self.fields[i];
        let mut out = Vec::new();
        let mut s = s0;
        while s <= s1 {
            let pt = &pts[s];
            if key(pt) == Val::Exact(mv) {
                out.push(pt.res.clone().expect("residue of exact coefficient"));
            } else {
                out.push(fi.zero());
            }
            s += e as usize;
        }
        Ok(fi.poly_trim(out))
    }

    /// R_i(g) for 0 ≤ i ≤ r.
    pub fn residual_poly(&self, i: usize, g: &PadicPoly) -> Result<FFPoly> {
        if i == 0 {
            let v = g.v1().ok_or(Error::PrecisionExhausted(g.prec()))?;
            let gg = g.mul_p_pow(-v).normalize();
            let f0 = &self.fields[0];
            return Ok(f0.poly_trim(gg.reduce_mod_p().into_iter().map(FFElem::Prime).collect()));
        }
        let l = self.level(i);
        let pts = self.newton_points(i, &l.phi, l.v, g, None)?;
        self.residual_from_points(i, &pts, l.h, l.e)
    }

    /// ord_t(g) = ord_{ψ_r} R_r(g).
    pub fn ord_in_type(&self, g: &PadicPoly) -> Result<usize> {
        let r = self.order();
        let rp = self.residual_poly(r, g)?;
        let psi = if r == 0 {
            &self.psi0
        } else {
            &self.level(r).psi
        };
        Ok(self.fields[r].poly_ord(&rp, psi))
    }

    /// A polynomial of degree < m_i with v_i = u and residue `c` ∈ F_i.
    pub fn construct(&self, i: usize, u: i64, c: &FFElem) -> Result<PadicPoly> {
        let fi = &self.fields[i];
        if fi.is_zero(c) {
            return Err(Error::Infeasible(u));
        }
        if i == 1 {
            let coeffs: Vec<BigInt> = fi
                .coords(c)
                .iter()
                .map(|x| BigInt::from(x.prime_value().expect("prime-field coordinate")))
                .collect();
            return Ok(PadicPoly::new(self.p, self.prec, coeffs).mul_p_pow(u));
        }
        let vi = self.big_v(i);
        let big_e = self.ram(i - 1);
        if u < vi {
            // build at a value where every nested level stays integral, then divide by p^μ
            let mu = (vi - u + big_e - 1) / big_e;
            let scale = Exp::from(mu) * Exp::from(big_e);
            let mut mono = self
                .pi_vec(i)?
                .into_iter()
                .map(|x| exp_mul(x, scale))
                .collect::<Result<Vec<_>>>()?;
            mono[0] = exp_add(mono[0], (-mu).into())?;
            let c2 = fi.div(c, &self.monores(i, &mono)?)?;
            return Ok(self.construct(i, u + mu * big_e, &c2)?.mul_p_pow(-mu));
        }
        let k = i - 1;
        let l = self.level(k);
        let w = l.w();
        let s0 = (u * l.ell).mod_floor(&l.e);
        let u0 = (u - s0 * w) / l.e;
        let mono = self.twist_monomial(i, s0, u0, u)?;
        let c2 = fi.div(c, &self.monores(i, &mono)?)?;
        let coords = fi.coords(&c2);
        let fk = &self.fields[k];
        let mut acc = PadicPoly::zero(self.p, self.prec);
        let phi_e = pow(&l.phi, l.e as usize);
        let mut phi_pow = pow(&l.phi, s0 as usize);
        for (t, ct) in coords.iter().enumerate() {
            if !fk.is_zero(ct) {
                let s = s0 + t as i64 * l.e;
                let ut = (u - s * w) / l.e;
                debug_assert_eq!((u - s * w).mod_floor(&l.e), 0);
                let b = self.construct(k, ut, ct)?;
                acc = acc.add(&b.mul(&phi_pow));
            }
            phi_pow = phi_pow.mul(&phi_e);
        }
        Ok(acc)
    }

    /// A representative φ_{r+1}: monic of degree m_{r+1} with R_r(φ_{r+1}) = ψ_r.
    pub fn representative(&self) -> Result<PadicPoly> {
        let r = self.order();
        if r == 0 {
            let coeffs: Vec<BigInt> = self
                .psi0
                .iter()
                .map(|c| BigInt::from(c.prime_value().unwrap()))
                .collect();
            return Ok(PadicPoly::new(self.p, self.prec, coeffs));
        }
        let l = self.level(r);
        let w = l.w();
        let phi_e = pow(&l.phi, l.e as usize);
        let mut acc = pow(&phi_e, l.f);
        let fr = &self.fields[r];
        let mut phi_pow = PadicPoly::one(self.p, self.prec);
        for j in 0..l.f {
            let c = &l.psi[j];
            if !fr.is_zero(c) {
                let b = self.construct(r, (l.f - j) as i64 * w, c)?;
                acc = acc.add(&b.mul(&phi_pow));
            }
            phi_pow = phi_pow.mul(&phi_e);
        }
        let out = acc.normalize();
        if out.den() != 0 {
            return Err(Error::NotARepresentative);
        }
        Ok(out.at_prec(self.prec))
    }

    /// New type with a level r+1 given by (φ, slope −h/e, ψ) appended.
    pub fn extend(&self, phi: PadicPoly, h: i64, e: i64, psi: FFPoly) -> Result<Self> {
        let r = self.order();
        let i = r + 1;
        let v = self.big_v(i);
        let m = phi.degree().ok_or(Error::EmptyInput)?;
        debug_assert_eq!(m, self.m(i));
        let top = self.fields[i].extend(&psi)?;
        let ell = mod_inverse(h, e);
        let pi = self.pi_vec(i)?;
        let mut t = self.clone();
        let mut phi_exps = pi
            .iter()
            .map(|&x| exp_mul(-x, (e * v + h).into()))
            .collect::<Result<Vec<_>>>()?;
        phi_exps.push(e.into());
        t.levels.push(TypeLevel {
            phi: phi.at_prec(self.prec),
            m,
            v,
            h,
            e,
            f: psi.len() - 1,
            psi,
            ell,
            pi_exps: pi,
            phi_exps,
        });
        t.fields.push(top);
        Ok(t)
    }

    /// The type formed by levels 1..=r (r ≤ order).
    pub fn truncated(&self, r: usize) -> Self {
        assert!(r <= self.order());
        let mut t = self.clone();
        t.levels.truncate(r);
        t.fields.truncate(r + 2);
        t
    }

    /// Same type with level r replaced: new φ_r (same V_r), new slope and ψ_r.
    pub fn refine(&self, phi: PadicPoly, h: i64, e: i64, psi: FFPoly) -> Result<Self> {
        let mut t = self.clone();
        t.levels.pop();
        t.fields.pop();
        t.extend(phi, h, e, psi)
    }

    /// Exponents (j_π, [j_1, …, j_R]) with Ψ = p^{j_π} φ_1^{j_1}⋯φ_R^{j_R},
    /// deg Ψ < m_{r+1} and w(Ψ) = u.
    pub fn universal_exponents(&self, u: i64) -> (i64, Vec<i64>) {
        let rr = self.depth();
        let e = self.e();
        let n = Integer::div_floor(&u, &e);
        let t = u.mod_floor(&e);
        let mut j = vec![0i64; rr];
        if rr == 0 {
            return (n + t, j);
        }
        let lr = self.level(rr);
        j[rr - 1] = (mod_inverse(lr.h, lr.e) * t).mod_floor(&lr.e);
        let mut big_m = (t - j[rr - 1] * lr.h) / lr.e;
        for i in (2..=rr).rev() {
            let li = self.level(i);
            let lo = self.level(i - 1);
            let rhs = big_m - j[i - 1] * li.v;
            j[i - 2] = (mod_inverse(lo.h, lo.e) * rhs).mod_floor(&lo.e);
            big_m = (rhs - j[i - 2] * lo.h) / lo.e;
        }
        (n + big_m, j)
    }

    /// The universal polynomial Ψ with w(Ψ) = u, at numerator precision `prec`.
    pub fn universal_poly(&self, u: i64, prec: u32) -> PadicPoly {
        let (jp, j) = self.universal_exponents(u);
        let mut acc = PadicPoly::one(self.p, prec);
        for (i, &ji) in j.iter().enumerate() {
            if ji > 0 {
                acc = acc.mul(&pow(&self.level(i + 1).phi.at_prec(prec), ji as usize));
            }
        }
        acc.mul_p_pow(jp).at_prec(prec)
    }

    /// v(g(θ)) for a root θ of the factor: w(g)/e when deg g < m_{r+1}, or the
    /// closed form for a stored φ_i.
    pub fn value_at_root(&self, g: &PadicPoly) -> Result<Rational64> {
        let r = self.order();
        let deg = g.degree().unwrap_or(0);
        if deg < self.degree() {
            let w = self.w(g)?.require()?;
            return Ok(Rational64::new(w, self.e()));
        }
        for i in 1..=r {
            let l = self.level(i);
            if l.phi.eq_mod(g, self.prec) {
                return Ok(Rational64::new(l.e * l.v + l.h, l.e * self.ram(i - 1)));
            }
        }
        Err(Error::OutOfRange(deg))
    }

    /// JSON dump with per-level {m, h, e, f, V, psi, slope, phi}.
    pub fn to_json(&self) -> serde_json::Value {
        let dump = TypeDump {
            p: self.p,
            order: self.order(),
            psi0: self.psi0.clone(),
            f0: self.f0(),
            levels: self
                .levels
                .iter()
                .map(|l| LevelDump {
                    m: l.m,
                    h: l.h,
                    e: l.e,
                    f: l.f,
                    v: l.v,
                    psi: l.psi.clone(),
                    slope: l.slope().to_string(),
                    phi: l
                        .phi
                        .residues(self.prec)
                        .iter()
                        .map(|c| c.to_string())
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_value(dump).expect("serializable")
    }
}

/// `g^k` by repeated squaring.
pub fn pow(g: &PadicPoly, mut k: usize) -> PadicPoly {
    let mut acc = PadicPoly::one(g.p(), g.prec());
    let mut base = g.clone();
    while k > 0 {
        if k & 1 == 1 {
            acc = acc.mul(&base);
        }
        k >>= 1;
        if k > 0 {
            base = base.mul(&base);
        }
    }
    acc
}
