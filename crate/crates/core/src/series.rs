//! Residue double series for the unit-exponent subclass.
//!
//! Closing both contours to the right picks up the simple poles
//! `s = (d_h + r) / D_h`, `t = (f_l + k) / F_l` of the m-block gammas:
//!
//! ```text
//! I = sum_{h, l, r, k} (-1)^{r+k} / (D_h F_l r! k!) phi(s, t) thbar_1(s) thbar_2(t) z1^s z2^t
//! ```
//!
//! Terms are summed ring by ring (`n = r + k`), lexicographically in
//! `(h, l, r)` within a ring, so the result does not depend on threading.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::convergence::analyticity_exponents;
use crate::error::{Error, Result};
use crate::eval::{EvalResult, Method};
use crate::gamma::{log_gamma, LogProduct};
use crate::kernel::{self, Blame, Factor};
use crate::model::{Block, EvalConfig, Spec1, Spec2, Var};
use crate::scalar::{cplx, principal_ln, Real};

/// Rings with more terms than this are evaluated in parallel.
const PAR_RING: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeriesDiagnostics {
    pub applicable: bool,
    pub reasons: Vec<String>,
    pub warnings: Vec<String>,
    pub pole_pairs_checked: usize,
}

impl SeriesDiagnostics {
    fn finish(reasons: Vec<String>, warnings: Vec<String>, pole_pairs_checked: usize) -> Self {
        Self { applicable: reasons.is_empty(), reasons, warnings, pole_pairs_checked }
    }
}

fn near_int<T: Real>(x: Complex<T>, tol: T) -> Option<i64> {
    let n = x.re.round();
    let scale = T::one().max(x.re.abs());
    if (x.re - n).abs() <= tol * scale && x.im.abs() <= tol * scale {
        n.to_i64()
    } else {
        None
    }
}

/// Checks one block: unit m-exponents, distinct pole lattices, and no
/// retained singular factor at the scanned poles. Returns pairs checked.
fn block_checks<T: Real>(
    block: &Block<T>,
    var: Var,
    cfg: &EvalConfig<T>,
    reasons: &mut Vec<String>,
) -> usize {
    let m = block.m;
    if m == 0 {
        reasons.push(format!("{var}: empty m-block (no residues)"));
        return 0;
    }
    for (j, e) in block.lower.iter().take(m).enumerate() {
        if e.exp != T::one() {
            reasons.push(format!("{var}: exponent of m-block entry {j} is {} (unit exponents required)", e.exp));
        }
        if !(e.coeff > T::zero()) {
            reasons.push(format!("{var}: m-block entry {j} needs a positive coefficient"));
        }
    }
    if !reasons.is_empty() {
        return 0;
    }
    let n_max = cfg.max_ring;
    let mut checked = 0;
    // condition: D_h (d_j + r) != D_j (d_h + mu)
    'pairs: for h in 0..m {
        for j in 0..m {
            if j == h {
                continue;
            }
            let (dh, ch) = (block.lower[h].coeff, block.lower[h].c);
            let (dj, cj) = (block.lower[j].coeff, block.lower[j].c);
            for r in 0..=n_max {
                checked += 1;
                let mu = (cj + T::from_count(r)) * dh / dj - ch;
                if let Some(k) = near_int(mu, cfg.pole_tol) {
                    if k >= 0 && k as usize <= n_max {
                        reasons.push(format!(
                            "{var}: poles of m-block entries {h} and {j} coincide (r = {k}, {r}); higher-order pole"
                        ));
                        break 'pairs;
                    }
                }
            }
        }
    }
    // retained factors (other than the m-block) must be regular at the poles
    let zero = Complex::new(T::zero(), T::zero());
    for h in 0..m {
        let mut f = kernel::residue_factors(block, var, h);
        f.retain(|f| !matches!(f.entry, crate::model::EntryRef::Lower(_, j) if j < m));
        for r in 0..=n_max {
            let x = kernel::residue_point(block, h, r);
            if let Some(entry) = kernel::singular_factor(&f, x, zero, cfg.pole_tol) {
                reasons.push(format!("{var}: {entry} is singular at the pole x = {x} (higher-order pole)"));
                return checked;
            }
        }
    }
    checked
}

/// Joint numerators must be regular on the scanned pole lattice.
fn joint_checks<T: Real>(spec: &Spec2<T>, cfg: &EvalConfig<T>, reasons: &mut Vec<String>) {
    let jf: Vec<Factor<T>> = kernel::joint_factors(spec).into_iter().filter(|f| f.e > T::zero()).collect();
    if jf.is_empty() {
        return;
    }
    let monotone = jf.iter().all(|f| f.ks >= T::zero() && f.kt >= T::zero());
    let n_max = cfg.max_ring;
    let (b1, b2) = (&spec.z1_block, &spec.z2_block);
    let half = T::lit(0.5);
    for h in 0..b1.m {
        for l in 0..b2.m {
            for r in 0..=n_max {
                let s = kernel::residue_point(b1, h, r);
                for k in 0..=(n_max - r) {
                    let t = kernel::residue_point(b2, l, k);
                    if let Some(entry) = kernel::singular_factor(&jf, s, t, cfg.pole_tol) {
                        reasons.push(format!("{entry} is singular at the pole pair s = {s}, t = {t}"));
                        return;
                    }
                    if monotone && jf.iter().all(|f| f.arg(s, t).re > half) {
                        break;
                    }
                }
                // larger r only moves further right
                if monotone && jf.iter().all(|f| f.arg(s, kernel::residue_point(b2, l, 0)).re > half) {
                    break;
                }
            }
        }
    }
}

/// Non-integer powers of gammas singular on the residue side carry branch
/// cuts there; the residue sum then differs from the integral.
fn branch_checks<T: Real>(factors: &[Factor<T>], reasons: &mut Vec<String>) {
    for f in factors {
        if (f.ks < T::zero() || f.kt < T::zero()) && f.e.fract() != T::zero() {
            reasons.push(format!("{}: non-integer exponent {} has branch points among the residues", f.entry, f.e));
        }
    }
}

fn boundary_warning<T: Real>(x: T, name: &str, var: Var, reasons: &mut Vec<String>, warnings: &mut Vec<String>) {
    let eps = T::lit(1e-12);
    if x > eps {
        reasons.push(format!("{name} = {x} > 0: residue series diverges"));
    } else if x.abs() <= eps {
        warnings.push(format!("{name}=0: series restricted to |{var}|<1"));
    }
}

/// Whether the residue series applies to `spec`, and why not.
pub fn series_applicability<T: Real>(spec: &Spec2<T>, cfg: &EvalConfig<T>) -> SeriesDiagnostics {
    let mut reasons = Vec::new();
    let mut warnings = Vec::new();
    let mut checked = block_checks(&spec.z1_block, Var::Z1, cfg, &mut reasons);
    checked += block_checks(&spec.z2_block, Var::Z2, cfg, &mut reasons);
    let mut factors = kernel::joint_factors(spec);
    factors.extend(kernel::block_factors(&spec.z1_block, Var::Z1));
    factors.extend(kernel::block_factors(&spec.z2_block, Var::Z2));
    branch_checks(&factors, &mut reasons);
    if reasons.is_empty() {
        joint_checks(spec, cfg, &mut reasons);
    }
    let (r, s) = analyticity_exponents(spec);
    boundary_warning(r, "R", Var::Z1, &mut reasons, &mut warnings);
    boundary_warning(s, "S", Var::Z2, &mut reasons, &mut warnings);
    SeriesDiagnostics::finish(reasons, warnings, checked)
}

/// One-variable analogue of [`series_applicability`].
pub fn series_applicability_1var<T: Real>(spec: &Spec1<T>, cfg: &EvalConfig<T>) -> SeriesDiagnostics {
    let mut reasons = Vec::new();
    let mut warnings = Vec::new();
    let checked = block_checks(&spec.block, Var::Z1, cfg, &mut reasons);
    branch_checks(&kernel::block_factors(&spec.block, Var::Z1), &mut reasons);
    let b = &spec.block;
    let r = b.upper.iter().map(|e| e.exp * e.coeff).sum::<T>() - b.lower.iter().map(|e| e.exp * e.coeff).sum::<T>();
    boundary_warning(r, "R", Var::Z1, &mut reasons, &mut warnings);
    SeriesDiagnostics::finish(reasons, warnings, checked)
}

/// Per-block residue coefficients `ln[(-1)^r thbar(x_r) / (D_h r!)]`,
/// extended on demand.
struct BlockCache<T> {
    /// `[h][r]` log coefficient (without the power of z)
    coef: Vec<Vec<LogProduct<T>>>,
    /// `[h][r]` pole location
    point: Vec<Vec<Complex<T>>>,
    factors: Vec<Vec<Factor<T>>>,
    ln_d: Vec<T>,
    var: Var,
}

impl<T: Real> BlockCache<T> {
    fn new(block: &Block<T>, var: Var) -> Self {
        let m = block.m;
        Self {
            coef: vec![Vec::new(); m],
            point: vec![Vec::new(); m],
            factors: (0..m).map(|h| kernel::residue_factors(block, var, h)).collect(),
            ln_d: block.lower.iter().take(m).map(|e| e.coeff.ln()).collect(),
            var,
        }
    }

    fn extend(&mut self, block: &Block<T>, upto: usize, lnfact: &[T], tol: T) -> Result<()> {
        let zero = Complex::new(T::zero(), T::zero());
        for h in 0..self.coef.len() {
            while self.coef[h].len() <= upto {
                let r = self.coef[h].len();
                let x = kernel::residue_point(block, h, r);
                let mut lp = kernel::ln_product(&self.factors[h], x, zero, tol, Blame::Residue)?;
                lp.sum -= cplx(self.ln_d[h] + lnfact[r]);
                if r % 2 == 1 {
                    lp.sum += Complex::new(T::zero(), T::PI());
                }
                self.coef[h].push(lp);
                self.point[h].push(x);
            }
        }
        let _ = self.var;
        Ok(())
    }
}

fn extend_lnfact<T: Real>(lnfact: &mut Vec<T>, upto: usize) {
    while lnfact.len() <= upto {
        let r = lnfact.len();
        let v = if r < 2 { T::zero() } else { lnfact[r - 1] + T::from_count(r).ln() };
        lnfact.push(v);
    }
}

/// Ring accumulator implementing the quiet-ring stopping rule.
struct Rings<T> {
    partial: Complex<T>,
    /// `sum |t| (4 + |ln |t||)`: each term comes out of `exp`, which
    /// turns absolute error in the log sum into relative error.
    rounding_mass: T,
    quiet: usize,
    quiet_mass: T,
    terms: usize,
    rings: usize,
    last_mass: T,
}

impl<T: Real> Rings<T> {
    fn new() -> Self {
        Self {
            partial: Complex::new(T::zero(), T::zero()),
            rounding_mass: T::zero(),
            quiet: 0,
            quiet_mass: T::zero(),
            terms: 0,
            rings: 0,
            last_mass: T::zero(),
        }
    }

    /// Adds one ring; returns `true` once converged.
    fn push(&mut self, terms: &[Complex<T>], cfg: &EvalConfig<T>) -> Result<bool> {
        let mut ring = Complex::new(T::zero(), T::zero());
        let mut mass = T::zero();
        for t in terms {
            ring += *t;
            let a = t.norm();
            mass += a;
            if a > T::zero() {
                self.rounding_mass += a * (T::lit(4.0) + a.ln().abs());
            }
        }
        self.partial += ring;
        self.terms += terms.len();
        self.rings += 1;
        self.last_mass = mass;
        if !(self.partial.re.is_finite() && self.partial.im.is_finite()) {
            return Err(Error::NoConvergence { rings: self.rings, last_ring: mass.to_f64_lossy() });
        }
        if mass == T::zero() || mass < cfg.tol_rel * self.partial.norm() {
            self.quiet += 1;
            self.quiet_mass += mass;
        } else {
            self.quiet = 0;
            self.quiet_mass = T::zero();
        }
        Ok(self.quiet >= cfg.quiet_rings)
    }

    fn exhausted(&self) -> Error {
        Error::NoConvergence { rings: self.rings, last_ring: self.last_mass.to_f64_lossy() }
    }

    /// Fails, when `gate` is set, once cancellation has eaten the requested accuracy.
    fn result(&self, warnings: Vec<String>, cfg: &EvalConfig<T>, gate: bool) -> Result<EvalResult<T>> {
        let est = self.quiet_mass + T::epsilon() * self.rounding_mass;
        let target = T::lit(10.0) * cfg.tol_rel * self.partial.norm();
        if gate && est > target {
            return Err(Error::AccuracyNotReached { estimate: est.to_f64_lossy(), target: target.to_f64_lossy() });
        }
        Ok(EvalResult {
            value: self.partial,
            abs_err_est: est,
            terms_used: self.terms.max(1),
            rings_used: self.rings,
            method: Method::Series,
            warnings,
        })
    }
}

fn require_applicable(d: &SeriesDiagnostics) -> Result<()> {
    if d.applicable {
        Ok(())
    } else {
        Err(Error::NotApplicable { reasons: d.reasons.clone() })
    }
}

fn check_disc<T: Real>(warnings: &[String], var: Var, name: &str, w: Complex<T>) -> Result<()> {
    let tag = format!("{name}=0");
    if warnings.iter().any(|s| s.starts_with(&tag)) && !(w.norm() < T::one()) {
        return Err(Error::NotApplicable {
            reasons: vec![format!("{name}=0 boundary: series requires |{var}| < 1, got |{var}| = {}", w.norm())],
        });
    }
    Ok(())
}

/// z-free part of the `(h, l, r, k)` summand (0-based `h`, `l`).
pub fn residue_term<T: Real>(spec: &Spec2<T>, h: usize, l: usize, r: usize, k: usize) -> Result<Complex<T>> {
    let tol = T::lit(crate::gamma::POLE_TOL);
    let b1 = &spec.z1_block;
    let b2 = &spec.z2_block;
    let mut acc = kernel::ln_theta_residue(b1, Var::Z1, h, r, tol)?;
    acc.add_ln(&kernel::ln_theta_residue(b2, Var::Z2, l, k, tol)?);
    let s = kernel::residue_point(b1, h, r);
    let t = kernel::residue_point(b2, l, k);
    acc.add_ln(&kernel::ln_product(&kernel::joint_factors(spec), s, t, tol, Blame::Residue)?);
    let lnfact = |n: usize| log_gamma(cplx(T::from_count(n + 1))).map(|v| v.re);
    acc.sum -= cplx(lnfact(r)? + lnfact(k)? + b1.lower[h].coeff.ln() + b2.lower[l].coeff.ln());
    let sign = if (r + k) % 2 == 1 { -T::one() } else { T::one() };
    Ok(acc.value() * sign)
}

/// Residue series of the two-variable function at `(z1, z2)`.
///
/// Fails with `AccuracyNotReached` when rounding in cancelling terms
/// exceeds ten times the requested relative tolerance.
pub fn eval_series<T: Real>(spec: &Spec2<T>, z1: Complex<T>, z2: Complex<T>, cfg: &EvalConfig<T>) -> Result<EvalResult<T>> {
    series2(spec, z1, z2, cfg, true)
}

/// [`eval_series`] without the accuracy gate; `abs_err_est` still says how bad it is.
pub fn eval_series_ungated<T: Real>(spec: &Spec2<T>, z1: Complex<T>, z2: Complex<T>, cfg: &EvalConfig<T>) -> Result<EvalResult<T>> {
    series2(spec, z1, z2, cfg, false)
}

fn series2<T: Real>(spec: &Spec2<T>, z1: Complex<T>, z2: Complex<T>, cfg: &EvalConfig<T>, gate: bool) -> Result<EvalResult<T>> {
    cfg.check()?;
    let zero = Complex::new(T::zero(), T::zero());
    if z1 == zero {
        return Err(Error::ZeroArgument { var: Var::Z1 });
    }
    if z2 == zero {
        return Err(Error::ZeroArgument { var: Var::Z2 });
    }
    let diag = series_applicability(spec, cfg);
    require_applicable(&diag)?;
    let (w1, w2) = spec.effective_args(z1, z2);
    check_disc(&diag.warnings, Var::Z1, "R", w1)?;
    check_disc(&diag.warnings, Var::Z2, "S", w2)?;
    let (lw1, lw2) = (principal_ln(w1), principal_ln(w2));

    let b1 = &spec.z1_block;
    let b2 = &spec.z2_block;
    let joint = kernel::joint_factors(spec);
    let mut c1 = BlockCache::new(b1, Var::Z1);
    let mut c2 = BlockCache::new(b2, Var::Z2);
    let mut lnfact = Vec::new();
    let mut acc = Rings::new();
    let (m2, m3) = (b1.m, b2.m);
    let tol = cfg.pole_tol;

    for n in 0..=cfg.max_ring {
        extend_lnfact(&mut lnfact, n);
        c1.extend(b1, n, &lnfact, tol)?;
        c2.extend(b2, n, &lnfact, tol)?;
        let count = m2 * m3 * (n + 1);
        let term = |idx: usize| -> Result<Complex<T>> {
            let h = idx / (m3 * (n + 1));
            let rem = idx % (m3 * (n + 1));
            let l = rem / (n + 1);
            let r = rem % (n + 1);
            let k = n - r;
            let (a, b) = (&c1.coef[h][r], &c2.coef[l][k]);
            if a.zero || b.zero {
                return Ok(zero);
            }
            let (s, t) = (c1.point[h][r], c2.point[l][k]);
            let mut ln = a.sum + b.sum + s * lw1 + t * lw2;
            if !joint.is_empty() {
                let p = kernel::ln_product(&joint, s, t, tol, Blame::Residue)?;
                if p.zero {
                    return Ok(zero);
                }
                ln += p.sum;
            }
            Ok(ln.exp())
        };
        let terms: Vec<Complex<T>> = if count >= PAR_RING && !joint.is_empty() {
            (0..count).into_par_iter().map(term).collect::<Result<_>>()?
        } else {
            (0..count).map(term).collect::<Result<_>>()?
        };
        if acc.push(&terms, cfg)? {
            return acc.result(diag.warnings, cfg, gate);
        }
    }
    Err(acc.exhausted())
}

/// Residue series of a one-variable function.
pub fn eval_series_1var<T: Real>(spec: &Spec1<T>, z: Complex<T>, cfg: &EvalConfig<T>) -> Result<EvalResult<T>> {
    cfg.check()?;
    if z == Complex::new(T::zero(), T::zero()) {
        return Err(Error::ZeroArgument { var: Var::Z1 });
    }
    let diag = series_applicability_1var(spec, cfg);
    require_applicable(&diag)?;
    let w = spec.effective_arg(z);
    check_disc(&diag.warnings, Var::Z1, "R", w)?;
    let lw = principal_ln(w);
    let b = &spec.block;
    let mut cache = BlockCache::new(b, Var::Z1);
    let mut lnfact = Vec::new();
    let mut acc = Rings::new();
    for n in 0..=cfg.max_ring {
        extend_lnfact(&mut lnfact, n);
        cache.extend(b, n, &lnfact, cfg.pole_tol)?;
        let terms: Vec<Complex<T>> = (0..b.m)
            .map(|h| {
                let c = &cache.coef[h][n];
                if c.zero {
                    Complex::new(T::zero(), T::zero())
                } else {
                    (c.sum + cache.point[h][n] * lw).exp()
                }
            })
            .collect();
        if acc.push(&terms, cfg)? {
            return acc.result(diag.warnings, cfg, true);
        }
    }
    Err(acc.exhausted())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SingleEntry;

    fn lerch_block(alpha: f64, p: f64) -> Block<f64> {
        Block::new(
            1,
            2,
            vec![SingleEntry::real(0.0, 1.0, 1.0), SingleEntry::real(1.0 - alpha, 1.0, p)],
            vec![SingleEntry::real(0.0, 1.0, 1.0), SingleEntry::real(-alpha, 1.0, p)],
        )
    }

    fn lerch2() -> Spec2<f64> {
        Spec2 { z1_block: lerch_block(1.0, 2.0), z2_block: lerch_block(1.0, 2.0), negate: [true; 2], ..Default::default() }
    }

    fn c(x: f64) -> Complex<f64> {
        cplx(x)
    }

    #[test]
    fn lerch_applicability() {
        let d = series_applicability(&lerch2(), &EvalConfig::default());
        assert!(d.applicable, "{:?}", d.reasons);
        assert!(d.warnings.iter().any(|w| w == "R=0: series restricted to |z1|<1"), "{:?}", d.warnings);
    }

    #[test]
    fn coincident_lattices() {
        let mut s = lerch2();
        s.z1_block = Block::new(
            2,
            0,
            vec![],
            vec![SingleEntry::real(0.0, 1.0, 1.0), SingleEntry::real(0.0, 1.0, 1.0)],
        );
        let d = series_applicability(&s, &EvalConfig::default());
        assert!(!d.applicable);
        assert!(d.reasons[0].contains("coincide"));
    }

    #[test]
    fn non_unit_exponent() {
        let mut s = lerch2();
        s.z1_block.lower[0].exp = 2.0;
        let d = series_applicability(&s, &EvalConfig::default());
        assert!(!d.applicable);
        assert!(d.reasons[0].contains("unit exponents"));
    }

    #[test]
    fn residue_terms_lerch() {
        let s = lerch2();
        assert!((residue_term(&s, 0, 0, 0, 0).unwrap() - 1.0).norm() < 1e-14);
        // (-1)^r from the residue; the argument negation restores 1/(1+1)^2
        assert!((residue_term(&s, 0, 0, 1, 0).unwrap() + 0.25).norm() < 1e-14);
    }

    #[test]
    fn lerch_product_value() {
        let r = eval_series(&lerch2(), c(0.5), c(0.5), &EvalConfig::default()).unwrap();
        assert!((r.value - 1.356_016_122_633_019_7).norm() < 1e-9, "{}", r.value);
        assert_eq!(r.method, Method::Series);
        assert!(r.abs_err_est >= 0.0 && r.terms_used >= 1);
    }

    #[test]
    fn lerch_outside_disc_rejected() {
        assert!(matches!(
            eval_series(&lerch2(), c(1.5), c(0.5), &EvalConfig::default()),
            Err(Error::NotApplicable { .. })
        ));
    }

    #[test]
    fn one_var_values() {
        let cfg = EvalConfig::default();
        let lerch = Spec1::negated(lerch_block(1.0, 2.0));
        let v = eval_series_1var(&lerch, c(0.5), &cfg).unwrap().value;
        assert!((v - 1.164_481_052_930_025).norm() < 1e-12);

        let wb = Spec1::new(Block::new(
            1,
            0,
            vec![],
            vec![SingleEntry::real(0.0, 1.0, 1.0), SingleEntry::real(0.0, 1.0, 1.0)],
        ));
        let v = eval_series_1var(&wb, c(1.0), &cfg).unwrap().value;
        assert!((v - 0.223_890_779_141_235_67).norm() < 1e-14);

        let exp = Spec1::new(Block::new(1, 0, vec![], vec![SingleEntry::real(0.0, 1.0, 1.0)]));
        let v = eval_series_1var(&exp, c(1.0), &cfg).unwrap().value;
        assert!((v - 0.367_879_441_171_442_3).norm() < 1e-15);
    }

    #[test]
    fn factorial_growth_bounded() {
        let wb = Block::new(
            1,
            0,
            vec![],
            vec![SingleEntry::real(0.0, 1.0, 1.0), SingleEntry::real(0.0, 1.0, 1.0)],
        );
        let s = Spec2 { z1_block: wb.clone(), z2_block: wb, ..Default::default() };
        let mut fact = 1.0;
        for r in 0..=20 {
            if r > 0 {
                fact *= r as f64;
            }
            let t = residue_term(&s, 0, 0, r, 0).unwrap();
            assert!((t * fact).norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn leading_term_dominates() {
        let s = lerch2();
        let z = c(1e-8);
        let v = eval_series(&s, z, z, &EvalConfig::default()).unwrap().value;
        let lead = residue_term(&s, 0, 0, 0, 0).unwrap();
        assert!((v / lead - 1.0).norm() < 1e-7);
    }

    #[test]
    fn zero_argument() {
        let err = eval_series(&lerch2(), c(0.0), c(0.5), &EvalConfig::default()).unwrap_err();
        assert_eq!(err, Error::ZeroArgument { var: Var::Z1 });
    }

    #[test]
    fn ring_cap() {
        let cfg = EvalConfig { max_ring: 3, ..EvalConfig::default() };
        assert!(matches!(eval_series(&lerch2(), c(0.9), c(0.9), &cfg), Err(Error::NoConvergence { .. })));
    }

    #[test]
    fn fractional_exponent_on_residue_side() {
        let mut s = lerch2();
        s.z1_block.lower[0].exp = 1.5;
        let d = series_applicability(&s, &EvalConfig::default());
        assert!(!d.applicable);
        assert!(d.reasons.iter().any(|r| r.contains("branch points")), "{:?}", d.reasons);
    }

    #[test]
    fn rounding_gate() {
        // two nearly coincident pole families: big cancelling residues
        let mut s = lerch2();
        s.z1_block = Block::new(
            2,
            0,
            vec![],
            vec![SingleEntry::real(0.0, 1.0, 1.0), SingleEntry::real(1e-5, 1.0, 1.0)],
        );
        let cfg = EvalConfig::default().with_tol(1e-13);
        let gated = eval_series(&s, c(0.5), c(0.5), &cfg);
        assert!(matches!(gated, Err(Error::AccuracyNotReached { .. })), "{gated:?}");
        let raw = eval_series_ungated(&s, c(0.5), c(0.5), &cfg).unwrap();
        assert!(raw.abs_err_est > 1e-11 * raw.value.norm());
    }
}
