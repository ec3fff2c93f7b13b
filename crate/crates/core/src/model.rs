//! Parameter lists of the one- and two-variable I-functions.
//!
//! A two-variable specification carries a joint block (gamma factors whose
//! arguments involve both Mellin variables `s` and `t`) and one single-variable
//! block per argument. Upper lists hold the `(a; alpha, A; xi)` / `(c, C; U)`
//! entries, lower lists the `(b; beta, B; eta)` / `(d, D; V)` entries. The
//! first `n` upper entries of a block contribute numerator factors
//! `Gamma^U(1 - c + C x)`, the remaining ones denominator factors
//! `Gamma^U(c - C x)`; the first `m` lower entries contribute numerator
//! factors `Gamma^V(d - D x)` and the rest denominator factors
//! `Gamma^V(1 - d + D x)`. Empty products are one.

use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::scalar::{cast_complex, Real};

/// Which argument a block belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Var {
    Z1,
    Z2,
}

impl Var {
    pub const BOTH: [Var; 2] = [Var::Z1, Var::Z2];

    pub fn index(self) -> usize {
        match self {
            Var::Z1 => 0,
            Var::Z2 => 1,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Z1 => f.write_str("z1"),
            Var::Z2 => f.write_str("z2"),
        }
    }
}

/// Location of a single gamma-factor entry inside a specification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryRef {
    UpperJoint(usize),
    LowerJoint(usize),
    Upper(Var, usize),
    Lower(Var, usize),
}

impl fmt::Display for EntryRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntryRef::UpperJoint(j) => write!(f, "upper_joint[{j}]"),
            EntryRef::LowerJoint(j) => write!(f, "lower_joint[{j}]"),
            EntryRef::Upper(v, j) => write!(f, "{v}_block.upper[{j}]"),
            EntryRef::Lower(v, j) => write!(f, "{v}_block.lower[{j}]"),
        }
    }
}

/// Entry of the joint block: `(a; alpha, A; xi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointEntry<T> {
    pub a: Complex<T>,
    /// Coefficient of `s`.
    pub alpha: T,
    /// Coefficient of `t`.
    pub big_a: T,
    /// Exponent of the gamma factor.
    pub xi: T,
}

impl<T: Real> JointEntry<T> {
    pub fn new(a: Complex<T>, alpha: T, big_a: T, xi: T) -> Self {
        Self { a, alpha, big_a, xi }
    }

    pub fn real(a: f64, alpha: f64, big_a: f64, xi: f64) -> Self {
        Self::new(Complex::new(T::lit(a), T::zero()), T::lit(alpha), T::lit(big_a), T::lit(xi))
    }

    fn cast<U: Real>(&self) -> JointEntry<U> {
        JointEntry {
            a: cast_complex(self.a),
            alpha: U::lit(self.alpha.to_f64_lossy()),
            big_a: U::lit(self.big_a.to_f64_lossy()),
            xi: U::lit(self.xi.to_f64_lossy()),
        }
    }
}

/// Entry of a single-variable block: `(c, C; U)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleEntry<T> {
    pub c: Complex<T>,
    /// Coefficient of the Mellin variable.
    pub coeff: T,
    /// Exponent of the gamma factor.
    pub exp: T,
}

impl<T: Real> SingleEntry<T> {
    pub fn new(c: Complex<T>, coeff: T, exp: T) -> Self {
        Self { c, coeff, exp }
    }

    pub fn real(c: f64, coeff: f64, exp: f64) -> Self {
        Self::new(Complex::new(T::lit(c), T::zero()), T::lit(coeff), T::lit(exp))
    }

    fn cast<U: Real>(&self) -> SingleEntry<U> {
        SingleEntry {
            c: cast_complex(self.c),
            coeff: U::lit(self.coeff.to_f64_lossy()),
            exp: U::lit(self.exp.to_f64_lossy()),
        }
    }
}

/// One-variable block `(m, n; upper; lower)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Block<T> {
    pub m: usize,
    pub n: usize,
    pub upper: Vec<SingleEntry<T>>,
    pub lower: Vec<SingleEntry<T>>,
}

impl<T: Real> Default for Block<T> {
    fn default() -> Self {
        Self::empty()
    }
}

impl<T: Real> Block<T> {
    pub fn empty() -> Self {
        Self { m: 0, n: 0, upper: Vec::new(), lower: Vec::new() }
    }

    pub fn new(m: usize, n: usize, upper: Vec<SingleEntry<T>>, lower: Vec<SingleEntry<T>>) -> Self {
        Self { m, n, upper, lower }
    }

    pub fn p(&self) -> usize {
        self.upper.len()
    }

    pub fn q(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.upper.is_empty() && self.lower.is_empty()
    }

    pub fn cast<U: Real>(&self) -> Block<U> {
        Block {
            m: self.m,
            n: self.n,
            upper: self.upper.iter().map(SingleEntry::cast).collect(),
            lower: self.lower.iter().map(SingleEntry::cast).collect(),
        }
    }
}

/// Two-variable I-function parameter list.
///
/// `negate[i]` marks that the function is evaluated at `-z_i` (the classical
/// reductions are stated at negated arguments); the evaluators apply it
/// before anything else, so every analytic quantity refers to the effective
/// argument `sign * z`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spec2<T> {
    pub n1: usize,
    pub upper_joint: Vec<JointEntry<T>>,
    pub lower_joint: Vec<JointEntry<T>>,
    pub z1_block: Block<T>,
    pub z2_block: Block<T>,
    pub negate: [bool; 2],
}

impl<T: Real> Default for Spec2<T> {
    fn default() -> Self {
        Self {
            n1: 0,
            upper_joint: Vec::new(),
            lower_joint: Vec::new(),
            z1_block: Block::empty(),
            z2_block: Block::empty(),
            negate: [false, false],
        }
    }
}

impl<T: Real> Spec2<T> {
    pub fn p1(&self) -> usize {
        self.upper_joint.len()
    }

    pub fn q1(&self) -> usize {
        self.lower_joint.len()
    }

    pub fn block(&self, var: Var) -> &Block<T> {
        match var {
            Var::Z1 => &self.z1_block,
            Var::Z2 => &self.z2_block,
        }
    }

    pub fn block_mut(&mut self, var: Var) -> &mut Block<T> {
        match var {
            Var::Z1 => &mut self.z1_block,
            Var::Z2 => &mut self.z2_block,
        }
    }

    /// `p1 = q1 = n1 = 0`: the function factorizes into two one-variable ones.
    pub fn is_separable(&self) -> bool {
        self.upper_joint.is_empty() && self.lower_joint.is_empty() && self.n1 == 0
    }

    /// Applies the argument negation flags.
    pub fn effective_args(&self, z1: Complex<T>, z2: Complex<T>) -> (Complex<T>, Complex<T>) {
        let flip = |z: Complex<T>, neg: bool| if neg { -z } else { z };
        (flip(z1, self.negate[0]), flip(z2, self.negate[1]))
    }

    pub fn cast<U: Real>(&self) -> Spec2<U> {
        Spec2 {
            n1: self.n1,
            upper_joint: self.upper_joint.iter().map(JointEntry::cast).collect(),
            lower_joint: self.lower_joint.iter().map(JointEntry::cast).collect(),
            z1_block: self.z1_block.cast(),
            z2_block: self.z2_block.cast(),
            negate: self.negate,
        }
    }
}

/// One-variable I-function parameter list.
#[derive(Debug, Clone, PartialEq)]
pub struct Spec1<T> {
    pub block: Block<T>,
    pub negate: bool,
}

impl<T: Real> Spec1<T> {
    pub fn new(block: Block<T>) -> Self {
        Self { block, negate: false }
    }

    pub fn negated(block: Block<T>) -> Self {
        Self { block, negate: true }
    }

    pub fn effective_arg(&self, z: Complex<T>) -> Complex<T> {
        if self.negate {
            -z
        } else {
            z
        }
    }
}

/// Tolerances and caps shared by the evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig<T> {
    /// Target relative accuracy.
    pub tol_rel: T,
    /// Cap on the ring index `r + k` of the residue series.
    pub max_ring: usize,
    /// Consecutive negligible rings required before the series stops.
    pub quiet_rings: usize,
    /// Contour truncation half-width; `None` selects it from the decay model.
    pub contour_halfwidth: Option<T>,
    /// Uniform panel count per half-axis; `None` uses the graded layout.
    pub contour_panels: Option<usize>,
    /// Tolerance for pole coincidence tests.
    pub pole_tol: T,
    /// Tolerance on `|arg z| - Delta pi / 2` for boundary detection.
    pub boundary_radius_tol: T,
    /// Evaluate the contour integral even when convergence is not established.
    pub force_contour: bool,
}

impl<T: Real> Default for EvalConfig<T> {
    fn default() -> Self {
        Self {
            tol_rel: T::lit(1e-12),
            max_ring: 1000,
            quiet_rings: 5,
            contour_halfwidth: None,
            contour_panels: None,
            pole_tol: T::lit(1e-9),
            boundary_radius_tol: T::lit(1e-9),
            force_contour: false,
        }
    }
}

impl<T: Real> EvalConfig<T> {
    pub fn with_tol(mut self, tol_rel: T) -> Self {
        self.tol_rel = tol_rel;
        self
    }

    pub fn check(&self) -> crate::Result<()> {
        if !(self.tol_rel > T::zero()) {
            return Err(crate::Error::Domain("tol_rel must be positive".into()));
        }
        if self.max_ring < 1 {
            return Err(crate::Error::Domain("max_ring must be at least 1".into()));
        }
        if !(self.pole_tol > T::zero()) {
            return Err(crate::Error::Domain("pole_tol must be positive".into()));
        }
        Ok(())
    }
}

/// Validation strictness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Coefficients must be positive.
    Strict,
    /// Zero or negative coefficients are accepted.
    Lax,
}

/// A broken structural rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.rule)
    }
}

fn violation(field: impl Into<String>, rule: impl Into<String>) -> Violation {
    Violation { field: field.into(), rule: rule.into() }
}

fn finite_complex<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

fn check_block<T: Real>(
    block: &Block<T>,
    prefix: &str,
    names: [&str; 2],
    mode: Mode,
    out: &mut Vec<Violation>,
) {
    let p = block.p();
    let q = block.q();
    if block.n > p {
        out.push(violation(format!("{prefix}.n"), format!("n{} > p{}", names[0], names[0])));
    }
    if block.m > q {
        out.push(violation(format!("{prefix}.m"), format!("m{} > q{}", names[0], names[0])));
    }
    for (side, entries, coef) in [("upper", &block.upper, names[1]), ("lower", &block.lower, "")] {
        for (j, e) in entries.iter().enumerate() {
            let field = format!("{prefix}.{side}[{j}]");
            if !finite_complex(e.c) || !e.coeff.is_finite() || !e.exp.is_finite() {
                out.push(violation(field.clone(), "non-finite value"));
            }
            if mode == Mode::Strict && !(e.coeff > T::zero()) {
                let _ = coef;
                out.push(violation(field, "coefficient must be positive in strict mode"));
            }
        }
    }
}

/// Structural validation; returns every broken rule (empty when valid).
pub fn validate_spec<T: Real>(spec: &Spec2<T>, mode: Mode) -> Vec<Violation> {
    let mut out = Vec::new();
    if spec.n1 > spec.p1() {
        out.push(violation("n1", "n1 > p1"));
    }
    for (j, e) in spec.upper_joint.iter().enumerate() {
        let field = format!("upper_joint[{j}]");
        if !finite_complex(e.a) || !e.alpha.is_finite() || !e.big_a.is_finite() || !e.xi.is_finite() {
            out.push(violation(field.clone(), "non-finite value"));
        }
        if mode == Mode::Strict && !(e.alpha > T::zero() && e.big_a > T::zero()) {
            out.push(violation(field, "alpha and A must be positive in strict mode"));
        }
    }
    for (j, e) in spec.lower_joint.iter().enumerate() {
        let field = format!("lower_joint[{j}]");
        if !finite_complex(e.a) || !e.alpha.is_finite() || !e.big_a.is_finite() || !e.xi.is_finite() {
            out.push(violation(field.clone(), "non-finite value"));
        }
        if mode == Mode::Strict && !(e.alpha > T::zero() && e.big_a > T::zero()) {
            out.push(violation(field, "beta and B must be positive in strict mode"));
        }
    }
    check_block(&spec.z1_block, "z1_block", ["2", "C"], mode, &mut out);
    check_block(&spec.z2_block, "z2_block", ["3", "E"], mode, &mut out);

    let all_zero = spec.n1 == 0
        && spec.p1() == 0
        && spec.q1() == 0
        && [&spec.z1_block, &spec.z2_block]
            .iter()
            .all(|b| b.m == 0 && b.n == 0 && b.is_empty());
    if all_zero {
        out.push(violation("spec", "block sizes must not all be zero"));
    }
    out
}

/// Validation of a one-variable specification.
pub fn validate_spec1<T: Real>(spec: &Spec1<T>, mode: Mode) -> Vec<Violation> {
    let mut out = Vec::new();
    check_block(&spec.block, "block", ["", "C"], mode, &mut out);
    let b = &spec.block;
    if b.m == 0 && b.n == 0 && b.is_empty() {
        out.push(violation("spec", "block sizes must not all be zero"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_spec() -> Spec2<f64> {
        Spec2 {
            n1: 1,
            upper_joint: vec![JointEntry::real(0.5, 1.0, 1.0, 1.0)],
            lower_joint: vec![JointEntry::real(0.2, 1.0, 1.0, 1.0)],
            z1_block: Block::new(1, 1, vec![SingleEntry::real(0.3, 1.0, 1.0)], vec![SingleEntry::real(0.0, 1.0, 1.0)]),
            z2_block: Block::new(1, 0, vec![], vec![SingleEntry::real(0.0, 1.0, 1.0)]),
            negate: [false, false],
        }
    }

    #[test]
    fn count_bound_violation() {
        let mut spec = unit_spec();
        spec.n1 = 2;
        let v = validate_spec(&spec, Mode::Strict);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, "n1 > p1");
    }

    #[test]
    fn legal_unit_spec_is_clean() {
        assert!(validate_spec(&unit_spec(), Mode::Strict).is_empty());
        assert!(validate_spec(&unit_spec(), Mode::Lax).is_empty());
    }

    #[test]
    fn negative_coefficient_splits_modes() {
        let mut spec = unit_spec();
        spec.upper_joint[0].alpha = -1.0;
        assert!(validate_spec(&spec, Mode::Lax).is_empty());
        let strict = validate_spec(&spec, Mode::Strict);
        assert_eq!(strict.len(), 1);
        assert_eq!(strict[0].field, "upper_joint[0]");
    }

    #[test]
    fn all_empty_is_flagged() {
        let spec = Spec2::<f64>::default();
        let v = validate_spec(&spec, Mode::Lax);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].field, "spec");
    }

    #[test]
    fn block_bounds_and_non_finite() {
        let mut spec = unit_spec();
        spec.z2_block.m = 3;
        spec.z1_block.upper[0].coeff = f64::NAN;
        let v = validate_spec(&spec, Mode::Lax);
        let rules: Vec<_> = v.iter().map(|v| v.to_string()).collect();
        assert!(rules.contains(&"z2_block.m: m3 > q3".to_string()), "{rules:?}");
        assert!(rules.contains(&"z1_block.upper[0]: non-finite value".to_string()), "{rules:?}");
    }

    #[test]
    fn validation_is_pure() {
        let mut spec = unit_spec();
        spec.n1 = 4;
        spec.z1_block.lower[0].coeff = 0.0;
        let first = validate_spec(&spec, Mode::Strict);
        let _ = validate_spec(&spec, Mode::Lax);
        assert_eq!(first, validate_spec(&spec, Mode::Strict));
    }
}
