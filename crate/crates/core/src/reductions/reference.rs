//! Direct summation of classical defining series, used as oracles.
//!
//! Nothing here goes through the pole lattice or residue kernels; terms
//! come straight from the textbook definitions, with Pochhammer symbols
//! built by recurrence where the definition allows it.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::gamma::log_gamma;

/// Consecutive rings below the tolerance before the sum stops.
const QUIET: usize = 5;
const MAX_TERMS: usize = 100_000;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn sum_single(mut term: impl FnMut(usize) -> Result<C64>, tol: f64) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    let mut quiet = 0;
    for n in 0..MAX_TERMS {
        let t = term(n)?;
        acc += t;
        if t.norm() <= tol * acc.norm() {
            quiet += 1;
            if quiet >= QUIET {
                return Ok(acc);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NoConvergence { rings: MAX_TERMS, last_ring: f64::NAN })
}

fn sum_double(mut term: impl FnMut(usize, usize) -> Result<C64>, tol: f64) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    let mut quiet = 0;
    for n in 0..2000 {
        let mut ring = C64::new(0.0, 0.0);
        let mut mass = 0.0;
        for r in 0..=n {
            let t = term(r, n - r)?;
            ring += t;
            mass += t.norm();
        }
        acc += ring;
        if mass <= tol * acc.norm() {
            quiet += 1;
            if quiet >= QUIET {
                return Ok(acc);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NoConvergence { rings: 2000, last_ring: f64::NAN })
}

fn outside_disc(z: C64) -> Result<()> {
    if z.norm() >= 1.0 {
        return Err(Error::Domain(format!("|z| = {} outside the unit disc", z.norm())));
    }
    Ok(())
}

/// `sum_{n >= 1} z^n / n^p`.
pub fn polylog(p: f64, z: C64) -> Result<C64> {
    outside_disc(z)?;
    let mut zn = c(1.0);
    sum_single(
        |n| {
            zn *= z;
            Ok(zn / ((n + 1) as f64).powf(p))
        },
        1e-17,
    )
}

/// `sum_{n >= 0} z^n / (n + alpha)^p`.
pub fn lerch(p: f64, alpha: f64, z: C64) -> Result<C64> {
    outside_disc(z)?;
    let mut zn = c(1.0);
    sum_single(
        |n| {
            let t = zn / (n as f64 + alpha).powf(p);
            zn *= z;
            Ok(t)
        },
        1e-17,
    )
}

/// `sum_k prod Gamma(c + C k) / prod Gamma(d + D k) z^k / k!`.
pub fn wright_psi(num: &[(f64, f64)], den: &[(f64, f64)], z: C64) -> Result<C64> {
    sum_single(
        |k| {
            let kf = k as f64;
            let mut l = -log_gamma(c(kf + 1.0))?;
            for &(cc, cw) in num {
                l += log_gamma(c(cc + cw * kf))?;
            }
            for &(d, dw) in den {
                l -= log_gamma(c(d + dw * kf))?;
            }
            Ok(l.exp() * z.powu(k as u32))
        },
        1e-17,
    )
}

fn recip_gamma(x: f64) -> Result<f64> {
    // 1/Gamma vanishes at the poles
    if x <= 0.0 && x.fract() == 0.0 {
        return Ok(0.0);
    }
    let l = log_gamma(c(x))?;
    Ok((-l).exp().re)
}

/// `sum_k (-z)^k / (k! Gamma(alpha k + mu + 1))`.
pub fn wright_bessel(mu: f64, alpha: f64, z: C64) -> Result<C64> {
    let mut zk = c(1.0);
    let mut fact = 1.0;
    sum_single(
        |k| {
            if k > 0 {
                zk *= -z;
                fact *= k as f64;
            }
            Ok(zk / fact * recip_gamma(alpha * k as f64 + mu + 1.0)?)
        },
        1e-17,
    )
}

/// Pochhammer products `prod (a_j)_n` for n = 0, 1, ... by recurrence,
/// kept as log magnitude and sign so long sums do not overflow.
struct Poch<'a> {
    params: &'a [f64],
    values: Vec<(f64, f64)>,
}

impl<'a> Poch<'a> {
    fn new(params: &'a [f64]) -> Self {
        Self { params, values: vec![(0.0, 1.0)] }
    }

    fn get(&mut self, n: usize) -> (f64, f64) {
        while self.values.len() <= n {
            let k = (self.values.len() - 1) as f64;
            let (mut l, mut sg) = *self.values.last().unwrap_or(&(0.0, 1.0));
            for a in self.params {
                let x = a + k;
                l += x.abs().ln();
                sg *= x.signum();
            }
            self.values.push((l, sg));
        }
        self.values[n]
    }
}

/// Parameter lists of the double hypergeometric series.
#[derive(Debug, Clone, Default, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KdfLists {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    pub e: Vec<f64>,
    pub f: Vec<f64>,
}

/// `sum (a)_{m+n} (c)_m (e)_n / ((b)_{m+n} (d)_m (f)_n) z1^m z2^n / (m! n!)`.
pub fn kampe_de_feriet(l: &KdfLists, z1: C64, z2: C64) -> Result<C64> {
    let (mut pa, mut pb) = (Poch::new(&l.a), Poch::new(&l.b));
    let (mut pc, mut pd) = (Poch::new(&l.c), Poch::new(&l.d));
    let (mut pe, mut pf) = (Poch::new(&l.e), Poch::new(&l.f));
    let mut lnfact = vec![0.0f64];
    sum_double(
        |m, n| {
            while lnfact.len() <= m.max(n) {
                let k = lnfact.len() as f64;
                lnfact.push(lnfact.last().unwrap_or(&0.0) + k.ln());
            }
            let parts = [pa.get(m + n), pc.get(m), pe.get(n)];
            let below = [pb.get(m + n), pd.get(m), pf.get(n)];
            let mut l = -lnfact[m] - lnfact[n];
            let mut sg = 1.0;
            for (x, s) in parts {
                l += x;
                sg *= s;
            }
            for (x, s) in below {
                // a vanishing lower Pochhammer makes the term undefined
                if x == f64::NEG_INFINITY {
                    return Err(Error::Domain("lower parameter is a non-positive integer".into()));
                }
                l -= x;
                sg *= s;
            }
            Ok(z1.powu(m as u32) * z2.powu(n as u32) * (sg * l.exp()))
        },
        1e-17,
    )
}

/// Gamma-coefficient double series
/// `sum prod Gamma(a + alpha m + A n) prod Gamma(c + C m) prod Gamma(e + E n)
///  / (prod Gamma(b + beta m + B n) prod Gamma(d + D m) prod Gamma(f + F n)) z1^m z2^n / (m! n!)`.
#[derive(Debug, Clone, Default, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DoubleSeries {
    pub a: Vec<(f64, f64, f64)>,
    pub b: Vec<(f64, f64, f64)>,
    pub c: Vec<(f64, f64)>,
    pub d: Vec<(f64, f64)>,
    pub e: Vec<(f64, f64)>,
    pub f: Vec<(f64, f64)>,
}

pub fn double_series(p: &DoubleSeries, z1: C64, z2: C64) -> Result<C64> {
    sum_double(
        |m, n| {
            let (mf, nf) = (m as f64, n as f64);
            let mut l = -log_gamma(c(mf + 1.0))? - log_gamma(c(nf + 1.0))?;
            for &(a, al, aa) in &p.a {
                l += log_gamma(c(a + al * mf + aa * nf))?;
            }
            for &(b, be, bb) in &p.b {
                l -= log_gamma(c(b + be * mf + bb * nf))?;
            }
            for &(x, w) in &p.c {
                l += log_gamma(c(x + w * mf))?;
            }
            for &(x, w) in &p.d {
                l -= log_gamma(c(x + w * mf))?;
            }
            for &(x, w) in &p.e {
                l += log_gamma(c(x + w * nf))?;
            }
            for &(x, w) in &p.f {
                l -= log_gamma(c(x + w * nf))?;
            }
            Ok(l.exp() * z1.powu(m as u32) * z2.powu(n as u32))
        },
        1e-17,
    )
}

/// Oracle selector with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Reference {
    Polylog { p: f64 },
    Lerch { p: f64, alpha: f64 },
    WrightPsi { num: Vec<(f64, f64)>, den: Vec<(f64, f64)> },
    WrightBessel { mu: f64, alpha: f64 },
    Kdf(KdfLists),
    DoubleSeries(DoubleSeries),
}

/// Evaluates the chosen oracle. One-variable kinds read `z1` only.
pub fn reference_eval(kind: &Reference, z1: C64, z2: C64) -> Result<C64> {
    match kind {
        Reference::Polylog { p } => polylog(*p, z1),
        Reference::Lerch { p, alpha } => lerch(*p, *alpha, z1),
        Reference::WrightPsi { num, den } => wright_psi(num, den, z1),
        Reference::WrightBessel { mu, alpha } => wright_bessel(*mu, *alpha, z1),
        Reference::Kdf(l) => kampe_de_feriet(l, z1, z2),
        Reference::DoubleSeries(p) => double_series(p, z1, z2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dilogarithm_half() {
        let want = std::f64::consts::PI.powi(2) / 12.0 - std::f64::consts::LN_2.powi(2) / 2.0;
        assert!((polylog(2.0, c(0.5)).unwrap() - want).norm() < 1e-15);
    }

    #[test]
    fn lerch_half() {
        assert!((lerch(2.0, 1.0, c(0.5)).unwrap() - 1.164_481_052_930_025).norm() < 1e-14);
        assert!((lerch(3.0, 2.0, c(1e-12)).unwrap() - 0.125).norm() < 1e-12);
    }

    #[test]
    fn bessel_and_psi() {
        assert!((wright_bessel(0.0, 1.0, c(1.0)).unwrap() - 0.223_890_779_141_235_67).norm() < 1e-15);
        let e = wright_psi(&[(1.0, 1.0)], &[(1.0, 1.0)], c(1.0)).unwrap();
        assert!((e - std::f64::consts::E).norm() < 1e-14);
    }

    #[test]
    fn double_series_oracles() {
        let e2 = kampe_de_feriet(&KdfLists::default(), c(1.0), c(1.0)).unwrap();
        assert!((e2 - std::f64::consts::E.powi(2)).norm() < 1e-13);
        let l = KdfLists { a: vec![1.0], ..Default::default() };
        assert!((kampe_de_feriet(&l, c(0.2), c(0.3)).unwrap() - 2.0).norm() < 1e-14);
        let s = DoubleSeries { a: vec![(1.0, 1.0, 1.0)], ..Default::default() };
        assert!((double_series(&s, c(0.1), c(0.1)).unwrap() - 1.25).norm() < 1e-14);
    }

    #[test]
    fn selector_dispatch() {
        let z = C64::new(0.3, 0.2);
        assert_eq!(reference_eval(&Reference::Polylog { p: 2.0 }, z, c(9.0)).unwrap(), polylog(2.0, z).unwrap());
        assert_eq!(reference_eval(&Reference::Lerch { p: 2.0, alpha: 0.5 }, z, c(0.0)).unwrap(), lerch(2.0, 0.5, z).unwrap());
        let k = KdfLists { a: vec![0.5], c: vec![1.5], d: vec![2.0], ..Default::default() };
        let v = reference_eval(&Reference::Kdf(k.clone()), z, z).unwrap();
        assert_eq!(v, kampe_de_feriet(&k, z, z).unwrap());
        // long rings: Pochhammer products pass f64 range before the sum settles
        assert!((v - C64::new(1.227_305_792_150_46, 0.411_247_384_442_352)).norm() < 1e-13, "{v}");
        assert!(reference_eval(&Reference::Polylog { p: 2.0 }, c(1.5), z).is_err());
    }
}
