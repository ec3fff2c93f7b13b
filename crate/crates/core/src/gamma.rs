//! Principal-branch complex log-gamma and powered gamma factors.
//!
//! `Gamma^xi(z)` is defined as `exp(xi * log_gamma(z))` on the principal
//! analytic branch of log-gamma (continuous off the negative real axis, real
//! on the positive real axis, limit from above on the negative axis). For
//! non-integer `xi` this is a convention, not something forced by the
//! integral.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cplx, Real};

/// Default distance from a nonpositive integer treated as a pole.
pub const POLE_TOL: f64 = 1e-9;

// B_{2k} / (2k (2k - 1)), k = 1..10
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

/// True when `z` lies within `tol` of a nonpositive integer.
pub fn is_pole<T: Real>(z: Complex<T>, tol: T) -> bool {
    if z.re > T::lit(0.5) {
        return false;
    }
    let n = z.re.round();
    n <= T::zero() && (z.re - n).hypot(z.im) < tol
}

/// Stirling series, valid for `Re z >= 1/2`.
fn log_gamma_right<T: Real>(z: Complex<T>) -> Complex<T> {
    let ten = T::lit(10.0);
    let one = T::one();
    let mut w = z;
    // lnΓ(z) = lnΓ(z + N) − Σ ln(z + k); pairs of factors have |arg| < π.
    let mut shift = Complex::new(T::zero(), T::zero());
    while w.norm_sqr() < ten * ten {
        let pair = w * (w + one);
        shift += pair.ln();
        w += T::lit(2.0);
    }
    let half_ln_2pi = T::lit(0.918_938_533_204_672_8);
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut corr = Complex::new(T::zero(), T::zero());
    let mut pw = inv;
    for c in STIRLING {
        let term = pw * T::lit(c);
        corr += term;
        if term.norm() <= T::epsilon() * T::lit(1e-3) * corr.norm() {
            break;
        }
        pw *= inv2;
    }
    (w - T::lit(0.5)) * w.ln() - w + half_ln_2pi + corr - shift
}

/// `ln(1 - exp(2 pi i z))` for `Im z >= 0`, computed without cancellation.
fn ln_one_minus_e2piz<T: Real>(z: Complex<T>) -> Complex<T> {
    let two_pi = T::TAU();
    let xf = z.re - z.re.round();
    let decay = (-two_pi * z.im).exp();
    let sin_half = (T::PI() * xf).sin();
    let re = -(-two_pi * z.im).exp_m1() + decay * T::lit(2.0) * sin_half * sin_half;
    let im = -decay * (two_pi * xf).sin();
    Complex::new(re, im).ln()
}

/// Principal log-gamma with an explicit pole tolerance.
pub fn log_gamma_tol<T: Real>(z: Complex<T>, tol: T) -> Result<Complex<T>> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("log_gamma of non-finite argument {z}")));
    }
    if is_pole(z, tol) {
        return Err(Error::Pole { re: z.re.to_f64_lossy(), im: z.im.to_f64_lossy() });
    }
    if z.im == T::zero() && (z.re == T::one() || z.re == T::lit(2.0)) {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    if z.re >= T::lit(0.5) {
        return Ok(log_gamma_right(z));
    }
    // Reflection on the upper half plane:
    //   lnΓ(z) = ln π − lnΓ(1 − z) − [−ln 2 + iπ/2 − iπz + ln(1 − e^{2πiz})],
    // where the bracket is the continuous log of sin(πz) for Im z > 0.
    // The lower half plane follows from conjugate symmetry.
    let lower = z.im < T::zero();
    let w = if lower { z.conj() } else { z };
    let i = Complex::new(T::zero(), T::one());
    let ln_sin = cplx(-T::LN_2()) + i * T::FRAC_PI_2() - i * T::PI() * w + ln_one_minus_e2piz(w);
    let v = cplx(T::PI().ln()) - log_gamma_right(cplx(T::one()) - w) - ln_sin;
    Ok(if lower { v.conj() } else { v })
}

/// Principal log-gamma; errors at nonpositive integers.
pub fn log_gamma<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    log_gamma_tol(z, T::lit(POLE_TOL))
}

/// `Gamma(z)^xi` on the principal branch; `xi = 0` yields one even at poles.
pub fn gamma_pow<T: Real>(z: Complex<T>, xi: T) -> Result<Complex<T>> {
    if xi == T::zero() {
        return Ok(cplx(T::one()));
    }
    Ok((log_gamma(z)? * xi).exp())
}

/// Running log of a product of powered gamma factors.
///
/// `zero` is set when a factor with negative effective exponent sits on a
/// pole (its reciprocal vanishes). A positive effective exponent at a pole
/// is reported to the caller.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogProduct<T> {
    pub sum: Complex<T>,
    pub zero: bool,
}

impl<T: Real> LogProduct<T> {
    pub fn one() -> Self {
        Self { sum: Complex::new(T::zero(), T::zero()), zero: false }
    }

    /// Multiplies by `Gamma(z)^e`. Returns `false` on an infinite factor.
    pub fn push(&mut self, z: Complex<T>, e: T, tol: T) -> Result<bool> {
        if e == T::zero() {
            return Ok(true);
        }
        if is_pole(z, tol) {
            if e > T::zero() {
                return Ok(false);
            }
            self.zero = true;
            return Ok(true);
        }
        if !self.zero {
            self.sum += log_gamma_tol(z, tol)? * e;
        }
        Ok(true)
    }

    pub fn add_ln(&mut self, other: &LogProduct<T>) {
        self.zero |= other.zero;
        self.sum += other.sum;
    }

    pub fn value(&self) -> Complex<T> {
        if self.zero {
            Complex::new(T::zero(), T::zero())
        } else {
            self.sum.exp()
        }
    }
}
