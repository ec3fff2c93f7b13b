//! Classical functions as special parameterizations, plus the structural
//! recognizer and the one-variable confluence limit.

pub mod reference;

use num_complex::Complex;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gamma::log_gamma;
use crate::identities::rewrite_power_shift;
use crate::model::{Block, JointEntry, SingleEntry, Spec1, Spec2, Var};
use crate::scalar::{cplx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpecialKind {
    H2,
    G2,
    Product1var,
    SrivastavaDaoust,
    KampeDeFeriet,
    WrightPsiProduct,
    WrightBesselProduct,
    LerchProduct,
    PolylogProduct,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpecialCaseTag {
    pub kind: SpecialKind,
    pub witness: Value,
}

/// Two one-variable functions side by side; the value is their product.
pub fn make_product_spec<T: Real>(s1: &Spec1<T>, s2: &Spec1<T>) -> Spec2<T> {
    Spec2 {
        z1_block: s1.block.clone(),
        z2_block: s2.block.clone(),
        negate: [s1.negate, s2.negate],
        ..Default::default()
    }
}

/// Left inverse of [`make_product_spec`].
pub fn factorize<T: Real>(spec: &Spec2<T>) -> Result<(Spec1<T>, Spec1<T>)> {
    if !spec.is_separable() {
        return Err(Error::NotSeparable);
    }
    Ok((
        Spec1 { block: spec.z1_block.clone(), negate: spec.negate[0] },
        Spec1 { block: spec.z2_block.clone(), negate: spec.negate[1] },
    ))
}

fn se(c: f64, coeff: f64, exp: f64) -> SingleEntry<f64> {
    SingleEntry::real(c, coeff, exp)
}

fn lead() -> SingleEntry<f64> {
    se(0.0, 1.0, 1.0)
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("{name} must be positive (got {x})")));
    }
    Ok(())
}

fn ln_gamma_real(x: f64) -> Result<Complex<f64>> {
    log_gamma(cplx(x))
}

/// Parameters of the gamma-coefficient double series.
pub type SdParams = reference::DoubleSeries;

/// The gamma-coefficient double series `S(z1, z2)`, with arguments negated.
///
/// Its value is the series of [`reference::double_series`]. The returned
/// number converts to the Pochhammer normalization
/// `(a)_{alpha m + A n} = Gamma(a + alpha m + A n) / Gamma(a)`:
/// value = prefactor * Pochhammer series.
pub fn make_srivastava_daoust(p: &SdParams) -> Result<(Complex<f64>, Spec2<f64>)> {
    for &(_, al, aa) in p.a.iter().chain(&p.b) {
        check_positive("joint coefficient", al)?;
        check_positive("joint coefficient", aa)?;
    }
    for &(_, w) in p.c.iter().chain(&p.d).chain(&p.e).chain(&p.f) {
        check_positive("block coefficient", w)?;
    }
    let joint = |v: &[(f64, f64, f64)]| v.iter().map(|&(a, al, aa)| JointEntry::real(1.0 - a, al, aa, 1.0)).collect();
    let block = |up: &[(f64, f64)], down: &[(f64, f64)]| {
        let upper: Vec<_> = up.iter().map(|&(c, w)| se(1.0 - c, w, 1.0)).collect();
        let mut lower = vec![lead()];
        lower.extend(down.iter().map(|&(d, w)| se(1.0 - d, w, 1.0)));
        Block::new(1, upper.len(), upper, lower)
    };
    let spec = Spec2 {
        n1: p.a.len(),
        upper_joint: joint(&p.a),
        lower_joint: joint(&p.b),
        z1_block: block(&p.c, &p.d),
        z2_block: block(&p.e, &p.f),
        negate: [true, true],
    };
    let mut l = cplx(0.0);
    for &(a, _, _) in &p.a {
        l += ln_gamma_real(a)?;
    }
    for &(x, _) in p.c.iter().chain(&p.e) {
        l += ln_gamma_real(x)?;
    }
    for &(b, _, _) in &p.b {
        l -= ln_gamma_real(b)?;
    }
    for &(x, _) in p.d.iter().chain(&p.f) {
        l -= ln_gamma_real(x)?;
    }
    Ok((l.exp(), spec))
}

pub type KdfParams = reference::KdfLists;

/// Kampé de Fériet function with unit coefficients.
///
/// Returns `(prefactor, spec)` with value = prefactor * F(z1, z2). The
/// arguments carry the negation flag so that residue signs cancel.
pub fn make_kampe_de_feriet(p: &KdfParams) -> Result<(Complex<f64>, Spec2<f64>)> {
    let ones = |v: &[f64]| v.iter().map(|&x| (x, 1.0)).collect::<Vec<_>>();
    let ones3 = |v: &[f64]| v.iter().map(|&x| (x, 1.0, 1.0)).collect::<Vec<_>>();
    let sd = SdParams { a: ones3(&p.a), b: ones3(&p.b), c: ones(&p.c), d: ones(&p.d), e: ones(&p.e), f: ones(&p.f) };
    make_srivastava_daoust(&sd)
}

fn psi_block(num: &[(f64, f64)], den: &[(f64, f64)]) -> Result<Block<f64>> {
    for &(_, w) in num.iter().chain(den) {
        check_positive("Wright coefficient", w)?;
    }
    let upper: Vec<_> = num.iter().map(|&(c, w)| se(1.0 - c, w, 1.0)).collect();
    let mut lower = vec![lead()];
    lower.extend(den.iter().map(|&(d, w)| se(1.0 - d, w, 1.0)));
    Ok(Block::new(1, upper.len(), upper, lower))
}

/// `Psi(z1) Psi(z2)`; each list holds `(c, C)` pairs.
pub fn make_wright_psi_product(
    num1: &[(f64, f64)],
    den1: &[(f64, f64)],
    num2: &[(f64, f64)],
    den2: &[(f64, f64)],
) -> Result<Spec2<f64>> {
    Ok(make_product_spec(&Spec1::negated(psi_block(num1, den1)?), &Spec1::negated(psi_block(num2, den2)?)))
}

fn bessel_block(mu: f64, alpha: f64) -> Result<Block<f64>> {
    check_positive("alpha", alpha)?;
    Ok(Block::new(1, 0, vec![], vec![lead(), se(-mu, alpha, 1.0)]))
}

/// `J_mu^alpha(z1) J_nu^beta(z2)` with `J_mu^alpha(z) = sum (-z)^k / (k! Gamma(alpha k + mu + 1))`.
pub fn make_wright_bessel_product(mu: f64, alpha: f64, nu: f64, beta: f64) -> Result<Spec2<f64>> {
    Ok(make_product_spec(&Spec1::new(bessel_block(mu, alpha)?), &Spec1::new(bessel_block(nu, beta)?)))
}

/// One-variable Lerch block, negated: value `sum z^r / (r + alpha)^p`.
pub fn lerch_block(p: f64, alpha: f64) -> Result<Block<f64>> {
    check_positive("p", p)?;
    check_positive("alpha", alpha)?;
    Ok(Block::new(1, 2, vec![lead(), se(1.0 - alpha, 1.0, p)], vec![lead(), se(-alpha, 1.0, p)]))
}

/// `Phi(z1, p, alpha) Phi(z2, q, beta)`.
pub fn make_lerch_product(p: f64, alpha: f64, q: f64, beta: f64) -> Result<Spec2<f64>> {
    Ok(make_product_spec(&Spec1::negated(lerch_block(p, alpha)?), &Spec1::negated(lerch_block(q, beta)?)))
}

/// `F(z1, p) F(z2, q)` for the polylogarithm `F(z, p) = z Phi(z, p, 1)`.
///
/// Built from the Lerch product by the unit power shift, which absorbs
/// the factor `w1 w2 = z1 z2` of the negated arguments. The note says so.
pub fn make_polylog_product(p: f64, q: f64) -> Result<(String, Spec2<f64>)> {
    let lerch = make_lerch_product(p, 1.0, q, 1.0)?;
    let rw = rewrite_power_shift(&lerch, 1.0, 1.0)?;
    let note = "external power z1*z2 absorbed by the power shift (k1, k2) = (1, 1) of the Lerch product".to_string();
    Ok((note, rw.output))
}

fn is_real_entry<T: Real>(e: &SingleEntry<T>, c: f64, coeff: f64, exp: f64) -> bool {
    e.c == cplx(T::lit(c)) && e.coeff == T::lit(coeff) && e.exp == T::lit(exp)
}

fn all_exps_one<T: Real>(spec: &Spec2<T>) -> bool {
    let one = T::one();
    spec.upper_joint.iter().chain(&spec.lower_joint).all(|e| e.xi == one)
        && [&spec.z1_block, &spec.z2_block].iter().all(|b| b.upper.iter().chain(&b.lower).all(|e| e.exp == one))
}

fn all_coeffs_one<T: Real>(spec: &Spec2<T>) -> bool {
    let one = T::one();
    spec.upper_joint.iter().chain(&spec.lower_joint).all(|e| e.alpha == one && e.big_a == one)
        && [&spec.z1_block, &spec.z2_block].iter().all(|b| b.upper.iter().chain(&b.lower).all(|e| e.coeff == one))
}

fn f<T: Real>(x: T) -> f64 {
    x.to_f64_lossy()
}

/// Block of the Wright Psi shape: m = 1, all upper numerators, lower led by (0,1;1), unit exponents.
fn psi_witness<T: Real>(b: &Block<T>) -> Option<Value> {
    if b.m != 1 || b.n != b.p() || b.q() == 0 || !is_real_entry(&b.lower[0], 0.0, 1.0, 1.0) {
        return None;
    }
    if b.upper.iter().chain(&b.lower).any(|e| e.exp != T::one() || e.c.im != T::zero()) {
        return None;
    }
    let num: Vec<_> = b.upper.iter().map(|e| [1.0 - f(e.c.re), f(e.coeff)]).collect();
    let den: Vec<_> = b.lower[1..].iter().map(|e| [1.0 - f(e.c.re), f(e.coeff)]).collect();
    Some(json!({ "num": num, "den": den }))
}

fn bessel_witness<T: Real>(b: &Block<T>) -> Option<Value> {
    if b.m != 1 || b.p() != 0 || b.q() != 2 || !is_real_entry(&b.lower[0], 0.0, 1.0, 1.0) {
        return None;
    }
    let e = &b.lower[1];
    if e.exp != T::one() || e.coeff <= T::zero() || e.c.im != T::zero() {
        return None;
    }
    Some(json!({ "mu": -f(e.c.re), "alpha": f(e.coeff) }))
}

/// Lerch shape with shift `k`: upper (k,1;1),(k+1-alpha,1;p); lower (k,1;1),(k-alpha,1;p).
fn lerch_witness<T: Real>(b: &Block<T>, k: f64) -> Option<(f64, f64)> {
    if b.m != 1 || b.n != 2 || b.p() != 2 || b.q() != 2 {
        return None;
    }
    if !is_real_entry(&b.upper[0], k, 1.0, 1.0) || !is_real_entry(&b.lower[0], k, 1.0, 1.0) {
        return None;
    }
    let (u, l) = (&b.upper[1], &b.lower[1]);
    let p = f(u.exp);
    let alpha = k - f(l.c.re);
    let ok = u.coeff == T::one()
        && l.coeff == T::one()
        && u.exp == l.exp
        && p > 0.0
        && alpha > 0.0
        && u.c.im == T::zero()
        && l.c.im == T::zero()
        && (f(u.c.re) - (k + 1.0 - alpha)).abs() < 1e-12;
    ok.then_some((p, alpha))
}

/// Lerch-like block with upper lead (1,1;1) over lower lead (0,1;1).
fn shifted_lerch_lead<T: Real>(b: &Block<T>) -> bool {
    b.p() == 2 && b.q() == 2 && is_real_entry(&b.upper[0], 1.0, 1.0, 1.0) && is_real_entry(&b.lower[0], 0.0, 1.0, 1.0)
}

/// Structural recognizer; every matching tag is returned.
pub fn classify_special<T: Real>(spec: &Spec2<T>) -> Vec<SpecialCaseTag> {
    let mut tags = Vec::new();
    let h2 = all_exps_one(spec);
    let tag = |kind, witness| SpecialCaseTag { kind, witness };
    if h2 {
        tags.push(tag(SpecialKind::H2, Value::Null));
        if all_coeffs_one(spec) {
            tags.push(tag(SpecialKind::G2, Value::Null));
        }
    }
    let neg = spec.negate == [true, true];
    if spec.is_separable() {
        tags.push(tag(SpecialKind::Product1var, Value::Null));
        let (b1, b2) = (&spec.z1_block, &spec.z2_block);
        if neg {
            if let (Some(w1), Some(w2)) = (psi_witness(b1), psi_witness(b2)) {
                tags.push(tag(SpecialKind::WrightPsiProduct, json!([w1, w2])));
            }
            if let (Some((p, a)), Some((q, b))) = (lerch_witness(b1, 0.0), lerch_witness(b2, 0.0)) {
                tags.push(tag(SpecialKind::LerchProduct, json!({ "p": p, "alpha": a, "q": q, "beta": b })));
            }
            if let (Some((p, 1.0)), Some((q, 1.0))) = (lerch_witness(b1, 1.0), lerch_witness(b2, 1.0)) {
                tags.push(tag(SpecialKind::PolylogProduct, json!({ "p": p, "q": q })));
            }
        } else if spec.negate == [false, false] {
            if let (Some(w1), Some(w2)) = (bessel_witness(b1), bessel_witness(b2)) {
                tags.push(tag(SpecialKind::WrightBesselProduct, json!([w1, w2])));
            }
        }
    }
    if neg && h2 && spec.n1 == spec.p1() {
        let joint_ok = spec.upper_joint.iter().chain(&spec.lower_joint).all(|e| e.alpha > T::zero() && e.big_a > T::zero());
        if let (true, Some(_), Some(_)) = (joint_ok, psi_witness(&spec.z1_block), psi_witness(&spec.z2_block)) {
            let jw = |v: &[JointEntry<T>]| v.iter().map(|e| [1.0 - f(e.a.re), f(e.alpha), f(e.big_a)]).collect::<Vec<_>>();
            tags.push(tag(
                SpecialKind::SrivastavaDaoust,
                json!({ "a": jw(&spec.upper_joint), "b": jw(&spec.lower_joint) }),
            ));
            if all_coeffs_one(spec) {
                let jv = |v: &[JointEntry<T>]| v.iter().map(|e| 1.0 - f(e.a.re)).collect::<Vec<_>>();
                let bv = |es: &[SingleEntry<T>]| es.iter().map(|e| 1.0 - f(e.c.re)).collect::<Vec<_>>();
                tags.push(tag(
                    SpecialKind::KampeDeFeriet,
                    json!({
                        "a": jv(&spec.upper_joint), "b": jv(&spec.lower_joint),
                        "c": bv(&spec.z1_block.upper), "d": bv(&spec.z1_block.lower[1..]),
                        "e": bv(&spec.z2_block.upper), "f": bv(&spec.z2_block.lower[1..]),
                    }),
                ));
            }
        }
    }
    tags
}

/// Remarks worth surfacing next to the tags.
pub fn structure_notes<T: Real>(spec: &Spec2<T>) -> Vec<String> {
    let mut out = Vec::new();
    for var in Var::BOTH {
        if shifted_lerch_lead(spec.block(var)) && spec.block(var).m == 1 && spec.block(var).n == 2 {
            out.push(format!(
                "{var} block has upper lead (1,1;1) with lower lead (0,1;1): the two pole families meet at 0 and no contour separates them; the Lerch series needs the upper lead (0,1;1)"
            ));
        }
    }
    out
}

/// Limit `z2 -> 0` as a one-variable function.
///
/// Pattern: `z2` block with `m = 1`, `n = p`, lower lead `(0,1;1)`, unit
/// coefficients and exponents in the `z2` block, unit `t` coefficients in
/// the joint lists, and `p1 + p3 < q1 + q3` (lower count including the
/// lead). Returns `(prefactor, spec1)` with
/// `lim I[z1, z2] = prefactor * I1[z1]`.
pub fn confluence_reduce<T: Real>(spec: &Spec2<T>) -> Result<(Complex<T>, Spec1<T>)> {
    let rule = "confluence".to_string();
    let miss = |d: &str| Error::PatternNotMatched { rule: rule.clone(), detail: d.to_string() };
    let b = &spec.z2_block;
    if b.m != 1 || b.n != b.p() {
        return Err(miss("z2 block must have m = 1 and n = p"));
    }
    if b.q() == 0 || !is_real_entry(&b.lower[0], 0.0, 1.0, 1.0) {
        return Err(miss("z2 block lower list must start with (0,1;1)"));
    }
    if b.upper.iter().chain(&b.lower).any(|e| e.coeff != T::one() || e.exp != T::one()) {
        return Err(miss("z2 block needs unit coefficients and exponents"));
    }
    if spec.upper_joint.iter().chain(&spec.lower_joint).any(|e| e.big_a != T::one()) {
        return Err(miss("joint entries need unit z2 coefficients"));
    }
    if spec.p1() + b.p() >= spec.q1() + b.q() {
        return Err(Error::ConstraintViolated {
            rule,
            constraint: format!("p1 + p3 < q1 + q3 + 1 fails ({} + {} vs {} + {})", spec.p1(), b.p(), spec.q1(), b.q() - 1),
        });
    }
    let one = cplx(T::one());
    let mut l = cplx(T::zero());
    for e in &b.upper {
        l += log_gamma(one - e.c)?;
    }
    for e in &b.lower[1..] {
        l -= log_gamma(one - e.c)?;
    }
    let single = |e: &JointEntry<T>| SingleEntry { c: e.a, coeff: e.alpha, exp: e.xi };
    let b1 = &spec.z1_block;
    let mut upper: Vec<_> = spec.upper_joint[..spec.n1].iter().map(single).collect();
    upper.extend(b1.upper.iter().copied());
    upper.extend(spec.upper_joint[spec.n1..].iter().map(single));
    // joint numerators sit in front of the block's own numerators, so the
    // leading n1 + n2 entries are exactly the numerators
    let mut lower = b1.lower.clone();
    lower.extend(spec.lower_joint.iter().map(single));
    let block = Block { m: b1.m, n: spec.n1 + b1.n, upper, lower };
    Ok((l.exp(), Spec1 { block, negate: spec.negate[0] }))
}
