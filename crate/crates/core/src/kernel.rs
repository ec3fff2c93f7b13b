//! Integrand kernels `phi(s, t)`, `theta_1(s)`, `theta_2(t)` and the residue
//! kernels obtained by removing the pole-generating factor.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::gamma::{is_pole, LogProduct, POLE_TOL};
use crate::model::{Block, EntryRef, Spec2, Var};
use crate::scalar::{cplx, Real};

/// Point of the Mellin variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPoint<T> {
    pub s: Complex<T>,
    pub t: Complex<T>,
}

impl<T: Real> KernelPoint<T> {
    pub fn new(s: Complex<T>, t: Complex<T>) -> Self {
        Self { s, t }
    }

    pub fn real(s: f64, t: f64) -> Self {
        Self::new(cplx(T::lit(s)), cplx(T::lit(t)))
    }
}

#[derive(Clone, Copy)]
pub(crate) enum Blame {
    Kernel,
    Residue,
}

fn blame(b: Blame, entry: EntryRef) -> Error {
    match b {
        Blame::Kernel => Error::KernelPole { entry },
        Blame::Residue => Error::DegeneratePole { entry },
    }
}

/// One gamma factor `Gamma(u0 + ks s + kt t)^e` with its effective
/// exponent (negative for denominator factors).
#[derive(Debug, Clone, Copy)]
pub(crate) struct Factor<T> {
    pub u0: Complex<T>,
    pub ks: T,
    pub kt: T,
    pub e: T,
    pub entry: EntryRef,
}

impl<T: Real> Factor<T> {
    #[inline]
    pub fn arg(&self, s: Complex<T>, t: Complex<T>) -> Complex<T> {
        self.u0 + s * self.ks + t * self.kt
    }
}

/// Factors of `phi`.
pub(crate) fn joint_factors<T: Real>(spec: &Spec2<T>) -> Vec<Factor<T>> {
    let one = cplx(T::one());
    let mut out = Vec::with_capacity(spec.p1() + spec.q1());
    for (j, e) in spec.upper_joint.iter().enumerate() {
        let entry = EntryRef::UpperJoint(j);
        out.push(if j < spec.n1 {
            Factor { u0: one - e.a, ks: e.alpha, kt: e.big_a, e: e.xi, entry }
        } else {
            Factor { u0: e.a, ks: -e.alpha, kt: -e.big_a, e: -e.xi, entry }
        });
    }
    for (j, e) in spec.lower_joint.iter().enumerate() {
        out.push(Factor { u0: one - e.a, ks: e.alpha, kt: e.big_a, e: -e.xi, entry: EntryRef::LowerJoint(j) });
    }
    out.retain(|f| f.e != T::zero());
    out
}

/// Factors of `theta` for one block, in the variable `s` (`kt = 0`).
pub(crate) fn block_factors<T: Real>(block: &Block<T>, var: Var) -> Vec<Factor<T>> {
    let one = cplx(T::one());
    let z = T::zero();
    let mut out = Vec::with_capacity(block.p() + block.q());
    for (j, e) in block.upper.iter().enumerate() {
        let entry = EntryRef::Upper(var, j);
        out.push(if j < block.n {
            Factor { u0: one - e.c, ks: e.coeff, kt: z, e: e.exp, entry }
        } else {
            Factor { u0: e.c, ks: -e.coeff, kt: z, e: -e.exp, entry }
        });
    }
    for (j, e) in block.lower.iter().enumerate() {
        let entry = EntryRef::Lower(var, j);
        out.push(if j < block.m {
            Factor { u0: e.c, ks: -e.coeff, kt: z, e: e.exp, entry }
        } else {
            Factor { u0: one - e.c, ks: e.coeff, kt: z, e: -e.exp, entry }
        });
    }
    out.retain(|f| f.e != T::zero());
    out
}

/// Log of the product of `factors` at `(s, t)`.
pub(crate) fn ln_product<T: Real>(
    factors: &[Factor<T>],
    s: Complex<T>,
    t: Complex<T>,
    tol: T,
    b: Blame,
) -> Result<LogProduct<T>> {
    let mut acc = LogProduct::one();
    for f in factors {
        if !acc.push(f.arg(s, t), f.e, tol)? {
            return Err(blame(b, f.entry));
        }
    }
    Ok(acc)
}

/// First factor with positive effective exponent sitting on a pole.
pub(crate) fn singular_factor<T: Real>(factors: &[Factor<T>], s: Complex<T>, t: Complex<T>, tol: T) -> Option<EntryRef> {
    factors.iter().find(|f| f.e > T::zero() && is_pole(f.arg(s, t), tol)).map(|f| f.entry)
}

/// Log of `phi(s, t)`.
pub(crate) fn ln_phi<T: Real>(spec: &Spec2<T>, s: Complex<T>, t: Complex<T>, tol: T) -> Result<LogProduct<T>> {
    ln_product(&joint_factors(spec), s, t, tol, Blame::Kernel)
}

/// `phi(s, t)`; one for empty joint blocks.
pub fn eval_phi<T: Real>(spec: &Spec2<T>, p: KernelPoint<T>) -> Result<Complex<T>> {
    Ok(ln_phi(spec, p.s, p.t, T::lit(POLE_TOL))?.value())
}

pub(crate) fn ln_theta<T: Real>(block: &Block<T>, var: Var, x: Complex<T>, tol: T) -> Result<LogProduct<T>> {
    ln_product(&block_factors(block, var), x, Complex::new(T::zero(), T::zero()), tol, Blame::Kernel)
}

/// `theta_1(x)` for the `z1` block or `theta_2(x)` for the `z2` block.
pub fn eval_theta<T: Real>(block: &Block<T>, var: Var, x: Complex<T>) -> Result<Complex<T>> {
    Ok(ln_theta(block, var, x, T::lit(POLE_TOL))?.value())
}

/// Pole `(d_h + r) / D_h` of the `h`-th numerator lower factor.
pub fn residue_point<T: Real>(block: &Block<T>, h: usize, r: usize) -> Complex<T> {
    let e = &block.lower[h];
    (e.c + T::from_count(r)) / e.coeff
}

pub(crate) fn check_residue_index<T: Real>(block: &Block<T>, var: Var, h: usize) -> Result<()> {
    if h >= block.m {
        return Err(Error::IndexOutOfRange { what: format!("{var} m-block"), index: h, len: block.m });
    }
    if block.lower[h].coeff == T::zero() {
        return Err(Error::Domain(format!("{var} m-block entry {h} has zero coefficient")));
    }
    Ok(())
}

/// Block factors with the `h`-th lower entry removed.
pub(crate) fn residue_factors<T: Real>(block: &Block<T>, var: Var, h: usize) -> Vec<Factor<T>> {
    let mut f = block_factors(block, var);
    f.retain(|f| f.entry != EntryRef::Lower(var, h));
    f
}

pub(crate) fn ln_theta_residue<T: Real>(
    block: &Block<T>,
    var: Var,
    h: usize,
    r: usize,
    tol: T,
) -> Result<LogProduct<T>> {
    check_residue_index(block, var, h)?;
    let x = residue_point(block, h, r);
    let zero = Complex::new(T::zero(), T::zero());
    ln_product(&residue_factors(block, var, h), x, zero, tol, Blame::Residue)
}

/// Residue kernel: `theta` at the `r`-th pole of lower entry `h` (0-based,
/// `h < m`) with that entry's gamma factor removed.
pub fn eval_theta_residue<T: Real>(block: &Block<T>, var: Var, h: usize, r: usize) -> Result<Complex<T>> {
    Ok(ln_theta_residue(block, var, h, r, T::lit(POLE_TOL))?.value())
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

    #[test]
    fn empty_inputs_are_exactly_one() {
        let spec = Spec2::<f64>::default();
        assert_eq!(eval_phi(&spec, KernelPoint::real(0.3, -1.7)).unwrap(), cplx(1.0));
        assert_eq!(eval_theta(&Block::<f64>::empty(), Var::Z1, cplx(2.5)).unwrap(), cplx(1.0));
    }

    #[test]
    fn phi_single_numerator() {
        let mut spec = Spec2::<f64>::default();
        spec.n1 = 1;
        spec.upper_joint.push(JointEntry::real(0.0, 1.0, 1.0, 1.0));
        assert!((eval_phi(&spec, KernelPoint::real(0.0, 0.0)).unwrap() - 1.0).norm() < 1e-15);
        spec.upper_joint[0].xi = 2.0;
        assert!((eval_phi(&spec, KernelPoint::real(1.0, 1.0)).unwrap() - 4.0).norm() < 1e-13);
    }

    #[test]
    fn phi_kernel_pole_names_entry() {
        let mut spec = Spec2::<f64>::default();
        spec.lower_joint.push(JointEntry::real(0.0, 1.0, 1.0, 1.0));
        spec.n1 = 0;
        spec.upper_joint.push(JointEntry::real(0.0, 1.0, 1.0, -1.0));
        // denominator upper entry with negative exponent acts as a numerator
        let err = eval_phi(&spec, KernelPoint::real(0.0, 0.0)).unwrap_err();
        assert_eq!(err, Error::KernelPole { entry: EntryRef::UpperJoint(0) });
    }

    #[test]
    fn theta_single_lower() {
        let b = Block::new(1, 0, vec![], vec![SingleEntry::real(0.5, 1.0, 1.0)]);
        let v = eval_theta(&b, Var::Z1, cplx(0.0)).unwrap();
        assert!((v.re - std::f64::consts::PI.sqrt()).abs() < 1e-14 && v.im == 0.0);
    }

    #[test]
    fn lerch_theta_oracle() {
        let v = eval_theta(&lerch_block(1.0, 2.0), Var::Z1, cplx(-0.25)).unwrap();
        assert!((v.re - 7.898_458_556_725_984).abs() < 1e-13 * 7.9, "{v}");
        assert!(v.im.abs() < 1e-13);
    }

    #[test]
    fn lerch_residue_kernel() {
        let b = lerch_block(1.0, 2.0);
        let r0 = eval_theta_residue(&b, Var::Z1, 0, 0).unwrap();
        let r1 = eval_theta_residue(&b, Var::Z1, 0, 1).unwrap();
        assert!((r0 - 1.0).norm() < 1e-14);
        assert!((r1 - 0.25).norm() < 1e-14);
        assert!(matches!(
            eval_theta_residue(&b, Var::Z1, 1, 0),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn bare_residue_kernel_is_one() {
        let b = Block::new(1, 0, vec![], vec![SingleEntry::real(0.3, 2.0, 1.0)]);
        for r in 0..6 {
            assert_eq!(eval_theta_residue(&b, Var::Z2, 0, r).unwrap(), cplx(1.0));
        }
    }

    #[test]
    fn degenerate_pole() {
        let b: Block<f64> = Block::new(
            2,
            0,
            vec![],
            vec![SingleEntry::real(0.0, 1.0, 1.0), SingleEntry::real(0.0, 1.0, 1.0)],
        );
        let err = eval_theta_residue(&b, Var::Z1, 0, 2).unwrap_err();
        assert_eq!(err, Error::DegeneratePole { entry: EntryRef::Lower(Var::Z1, 1) });
    }
}
