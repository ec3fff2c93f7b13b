//! Convergence exponents, sector widths and boundary indices.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Block, EvalConfig, Spec2, Var};
use crate::scalar::{principal_arg, Real};
use crate::strip;

/// Sufficiency verdict for one argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    InteriorSufficient,
    BoundaryAbsolute,
    NotEstablished,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::InteriorSufficient => "interior-sufficient",
            Verdict::BoundaryAbsolute => "boundary-absolute",
            Verdict::NotEstablished => "not-established",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport<T> {
    pub r: T,
    pub s: T,
    pub delta1: T,
    pub delta2: T,
    pub mu1: T,
    pub mu2: T,
    pub omega1: T,
    pub omega2: T,
    /// `None` when the corresponding m-block is empty.
    pub alpha_order: Option<T>,
    pub beta_order: Option<T>,
    pub verdict_z1: Verdict,
    pub verdict_z2: Verdict,
    /// Abscissa used to satisfy the boundary inequality with nonzero mu.
    pub sigma1: Option<T>,
    pub sigma2: Option<T>,
}

fn coeff<T: Real>(alpha: T, big_a: T, var: Var) -> T {
    match var {
        Var::Z1 => alpha,
        Var::Z2 => big_a,
    }
}

/// Sum of `exponent * coefficient` over the upper list minus the lower list.
fn full_sum<T: Real>(spec: &Spec2<T>, var: Var) -> T {
    let b = spec.block(var);
    let mut acc = T::zero();
    for e in &spec.upper_joint {
        acc += e.xi * coeff(e.alpha, e.big_a, var);
    }
    for e in &spec.lower_joint {
        acc -= e.xi * coeff(e.alpha, e.big_a, var);
    }
    for e in &b.upper {
        acc += e.exp * e.coeff;
    }
    for e in &b.lower {
        acc -= e.exp * e.coeff;
    }
    acc
}

/// `(R, S)`.
pub fn analyticity_exponents<T: Real>(spec: &Spec2<T>) -> (T, T) {
    (full_sum(spec, Var::Z1), full_sum(spec, Var::Z2))
}

fn width<T: Real>(spec: &Spec2<T>, var: Var) -> T {
    let b = spec.block(var);
    let mut acc = T::zero();
    for (j, e) in spec.upper_joint.iter().enumerate() {
        let w = e.xi * coeff(e.alpha, e.big_a, var);
        if j < spec.n1 {
            acc += w;
        } else {
            acc -= w;
        }
    }
    for e in &spec.lower_joint {
        acc -= e.xi * coeff(e.alpha, e.big_a, var);
    }
    for (j, e) in b.upper.iter().enumerate() {
        if j < b.n {
            acc += e.exp * e.coeff;
        } else {
            acc -= e.exp * e.coeff;
        }
    }
    for (j, e) in b.lower.iter().enumerate() {
        if j < b.m {
            acc += e.exp * e.coeff;
        } else {
            acc -= e.exp * e.coeff;
        }
    }
    acc
}

/// `(Delta_1, Delta_2)`.
pub fn arg_domain_widths<T: Real>(spec: &Spec2<T>) -> (T, T) {
    (width(spec, Var::Z1), width(spec, Var::Z2))
}

fn omega<T: Real>(spec: &Spec2<T>, var: Var) -> T {
    let half = T::lit(0.5);
    let b = spec.block(var);
    let mut acc = T::zero();
    for e in &spec.upper_joint {
        acc += e.xi * (e.a.re - half);
    }
    for e in &spec.lower_joint {
        acc -= e.xi * (e.a.re - half);
    }
    for e in &b.upper {
        acc += e.exp * (e.c.re - half);
    }
    for e in &b.lower {
        acc -= e.exp * (e.c.re - half);
    }
    acc
}

/// `(mu_1, mu_2, Omega_1, Omega_2)`.
pub fn boundary_indices<T: Real>(spec: &Spec2<T>) -> (T, T, T, T) {
    let (mu1, mu2) = analyticity_exponents(spec);
    (mu1, mu2, omega(spec, Var::Z1), omega(spec, Var::Z2))
}

/// Leading small-argument exponent `min Re(d_j / D_j)` over the m-block.
pub fn block_order<T: Real>(block: &Block<T>, var: Var) -> Result<T> {
    if block.m == 0 {
        return Err(Error::EmptyMBlock { var });
    }
    Ok(block
        .lower
        .iter()
        .take(block.m)
        .map(|e| (e.c / e.coeff).re)
        .fold(T::infinity(), |a, b| a.min(b)))
}

/// `(alpha, beta)` orders of the leading term for small arguments.
pub fn small_z_order<T: Real>(spec: &Spec2<T>) -> Result<(T, T)> {
    Ok((block_order(&spec.z1_block, Var::Z1)?, block_order(&spec.z2_block, Var::Z2)?))
}

/// Number of interior samples in the boundary abscissa scan.
const SIGMA_SCAN: usize = 64;

/// Largest `Omega + sigma mu` on interior samples of the feasible strip.
fn best_sigma<T: Real>(spec: &Spec2<T>, var: Var, mu: f64, om: f64) -> Option<(f64, f64)> {
    let (_, strips) = strip::select_abscissae(spec).ok()?;
    let s = strips[var.index()];
    (0..SIGMA_SCAN)
        .map(|i| s.lo + s.width() * (i as f64 + 0.5) / SIGMA_SCAN as f64)
        .map(|x| (x, om + x * mu))
        .fold(None, |best: Option<(f64, f64)>, c| match best {
            Some(b) if b.1 >= c.1 => Some(b),
            _ => Some(c),
        })
}

fn verdict<T: Real>(
    spec: &Spec2<T>,
    var: Var,
    w: Complex<T>,
    delta: T,
    mu: T,
    om: T,
    tol: T,
) -> (Verdict, Option<T>) {
    let arg = principal_arg(w).abs();
    let edge = delta * T::FRAC_PI_2();
    if delta > T::zero() && arg < edge - tol {
        return (Verdict::InteriorSufficient, None);
    }
    if delta >= T::zero() && (arg - edge).abs() <= tol {
        let mu_zero = mu.abs() <= T::lit(1e-12);
        if mu_zero && om > T::one() {
            return (Verdict::BoundaryAbsolute, None);
        }
        if !mu_zero {
            if let Some((x, v)) = best_sigma(spec, var, mu.to_f64_lossy(), om.to_f64_lossy()) {
                if v > 1.0 {
                    return (Verdict::BoundaryAbsolute, Some(T::lit(x)));
                }
            }
        }
    }
    (Verdict::NotEstablished, None)
}

/// Full report at `(z1, z2)`; the negation flags of the spec are applied first.
pub fn classify<T: Real>(spec: &Spec2<T>, z1: Complex<T>, z2: Complex<T>, cfg: &EvalConfig<T>) -> Result<ConvergenceReport<T>> {
    if z1 == Complex::new(T::zero(), T::zero()) {
        return Err(Error::ZeroArgument { var: Var::Z1 });
    }
    if z2 == Complex::new(T::zero(), T::zero()) {
        return Err(Error::ZeroArgument { var: Var::Z2 });
    }
    let (w1, w2) = spec.effective_args(z1, z2);
    let (r, s) = analyticity_exponents(spec);
    let (delta1, delta2) = arg_domain_widths(spec);
    let (mu1, mu2, omega1, omega2) = boundary_indices(spec);
    let (v1, sigma1) = verdict(spec, Var::Z1, w1, delta1, mu1, omega1, cfg.boundary_radius_tol);
    let (v2, sigma2) = verdict(spec, Var::Z2, w2, delta2, mu2, omega2, cfg.boundary_radius_tol);
    Ok(ConvergenceReport {
        r,
        s,
        delta1,
        delta2,
        mu1,
        mu2,
        omega1,
        omega2,
        alpha_order: block_order(&spec.z1_block, Var::Z1).ok(),
        beta_order: block_order(&spec.z2_block, Var::Z2).ok(),
        verdict_z1: v1,
        verdict_z2: v2,
        sigma1,
        sigma2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{JointEntry, SingleEntry};

    fn lerch_block(alpha: f64, p: f64) -> Block<f64> {
        Block::new(
            1,
            2,
            vec![SingleEntry::real(0.0, 1.0, 1.0), SingleEntry::real(1.0 - alpha, 1.0, p)],
            vec![SingleEntry::real(0.0, 1.0, 1.0), SingleEntry::real(-alpha, 1.0, p)],
        )
    }

    fn wb_block(mu: f64, alpha: f64) -> Block<f64> {
        Block::new(
            1,
            0,
            vec![],
            vec![SingleEntry::real(0.0, 1.0, 1.0), SingleEntry::real(-mu, alpha, 1.0)],
        )
    }

    fn product(b1: Block<f64>, b2: Block<f64>, negate: bool) -> Spec2<f64> {
        Spec2 { z1_block: b1, z2_block: b2, negate: [negate; 2], ..Default::default() }
    }

    fn cfg() -> EvalConfig<f64> {
        EvalConfig::default()
    }

    #[test]
    fn empty_spec_is_all_zero() {
        let s = Spec2::<f64>::default();
        assert_eq!(analyticity_exponents(&s), (0.0, 0.0));
        assert_eq!(arg_domain_widths(&s), (0.0, 0.0));
        assert_eq!(boundary_indices(&s), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn lerch_quantities() {
        let s = product(lerch_block(1.0, 2.0), lerch_block(1.0, 2.0), true);
        assert_eq!(analyticity_exponents(&s), (0.0, 0.0));
        assert_eq!(arg_domain_widths(&s), (2.0, 2.0));
        let (mu1, _, om1, om2) = boundary_indices(&s);
        assert_eq!(mu1, 0.0);
        assert_eq!((om1, om2), (2.0, 2.0));
        for p in [1.0, 3.0, 4.5] {
            let s = product(lerch_block(1.0, p), lerch_block(1.0, p), true);
            assert_eq!(arg_domain_widths(&s).0, 2.0);
        }
    }

    #[test]
    fn wright_bessel_quantities() {
        let s = product(wb_block(0.0, 1.0), wb_block(0.0, 1.0), false);
        assert_eq!(analyticity_exponents(&s), (-2.0, -2.0));
        assert_eq!(arg_domain_widths(&s), (0.0, 0.0));
    }

    #[test]
    fn omega_linearity_in_d() {
        let mut s = product(lerch_block(1.0, 2.0), lerch_block(1.0, 2.0), true);
        let base = boundary_indices(&s).2;
        s.z1_block.lower[0].c = -s.z1_block.lower[0].c - 0.3;
        let shifted = boundary_indices(&s).2;
        assert!((shifted - base - 0.3 * s.z1_block.lower[0].exp).abs() < 1e-15);
    }

    #[test]
    fn lerch_verdicts() {
        let z = Complex::new(0.5, 0.0);
        // raw arguments sit inside the sector
        let raw = product(lerch_block(1.0, 2.0), lerch_block(1.0, 2.0), false);
        let r = classify(&raw, z, z, &cfg()).unwrap();
        assert_eq!((r.verdict_z1, r.verdict_z2), (Verdict::InteriorSufficient, Verdict::InteriorSufficient));
        // negated ones land on the edge, where Omega = 2 > 1 gives case (i)
        let neg = product(lerch_block(1.0, 2.0), lerch_block(1.0, 2.0), true);
        let r = classify(&neg, z, z, &cfg()).unwrap();
        assert_eq!(r.verdict_z1, Verdict::BoundaryAbsolute);
        assert_eq!(r.sigma1, None);
    }

    #[test]
    fn wright_bessel_boundary_case_two() {
        let s = product(wb_block(0.0, 1.0), wb_block(0.0, 1.0), false);
        let z = Complex::new(1.0, 0.0);
        let r = classify(&s, z, z, &cfg()).unwrap();
        assert_eq!(r.verdict_z1, Verdict::BoundaryAbsolute);
        let sigma = r.sigma1.unwrap();
        assert!(sigma < 0.0 && r.omega1 + sigma * r.mu1 > 1.0);
    }

    #[test]
    fn off_edge_is_not_established() {
        let s = product(wb_block(0.0, 1.0), wb_block(0.0, 1.0), false);
        let z = Complex::new(0.0, 1.0);
        let r = classify(&s, z, z, &cfg()).unwrap();
        assert_eq!(r.verdict_z1, Verdict::NotEstablished);
    }

    #[test]
    fn zero_argument() {
        let s = product(wb_block(0.0, 1.0), wb_block(0.0, 1.0), false);
        let err = classify(&s, Complex::new(0.0, 0.0), Complex::new(1.0, 0.0), &cfg()).unwrap_err();
        assert_eq!(err, Error::ZeroArgument { var: Var::Z1 });
    }

    #[test]
    fn orders() {
        let s = product(lerch_block(1.0, 2.0), lerch_block(1.0, 2.0), true);
        assert_eq!(small_z_order(&s).unwrap(), (0.0, 0.0));
        let b: Block<f64> = Block::new(
            2,
            0,
            vec![],
            vec![SingleEntry::real(0.5, 1.0, 1.0), SingleEntry::real(0.25, 0.5, 1.0)],
        );
        assert_eq!(block_order(&b, Var::Z1).unwrap(), 0.5);
        assert!(matches!(block_order(&Block::<f64>::empty(), Var::Z2), Err(Error::EmptyMBlock { .. })));
    }

    #[test]
    fn doubling_exponents_doubles_joint_terms() {
        let mut s = product(lerch_block(0.7, 1.5), wb_block(0.3, 1.2), false);
        s.n1 = 1;
        s.upper_joint = vec![JointEntry::real(0.2, 0.5, 1.5, 1.0), JointEntry::real(0.4, 1.0, 0.5, 2.0)];
        s.lower_joint = vec![JointEntry::real(0.1, 0.75, 0.5, 0.5)];
        let before = (analyticity_exponents(&s), arg_domain_widths(&s), boundary_indices(&s));
        let mut d = s.clone();
        for e in d.upper_joint.iter_mut().chain(d.lower_joint.iter_mut()) {
            e.xi *= 2.0;
        }
        let mut blocks_only = s.clone();
        blocks_only.upper_joint.clear();
        blocks_only.lower_joint.clear();
        blocks_only.n1 = 0;
        let base = (analyticity_exponents(&blocks_only), arg_domain_widths(&blocks_only));
        let after = (analyticity_exponents(&d), arg_domain_widths(&d));
        let joint_r = before.0 .0 - base.0 .0;
        assert!((after.0 .0 - base.0 .0 - 2.0 * joint_r).abs() < 1e-14);
        let joint_d = before.1 .0 - base.1 .0;
        assert!((after.1 .0 - base.1 .0 - 2.0 * joint_d).abs() < 1e-14);
    }
}
