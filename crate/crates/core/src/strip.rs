//! Feasible contour abscissae.
//!
//! Left pole families come from the numerator factors `Gamma(1 - c + C x)`
//! (poles at `(c - 1 - k) / C`) and the joint numerators
//! `Gamma(1 - a + alpha s + A t)`; right families from `Gamma(d - D x)`
//! (poles at `(d + k) / D`). A straight contour `Re x = sigma` separates
//! them iff sigma lies strictly between the two sets.

use crate::error::{Error, Result};
use crate::model::{Block, Spec2, Var};
use crate::scalar::Real;

/// Width used to close a half-infinite strip.
pub(crate) const CAP: f64 = 2.0;

/// Open interval of admissible abscissae.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Strip {
    pub lo: f64,
    pub hi: f64,
}

impl Strip {
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }
}

/// Gamma factors of a block as `(u0, kappa, effective exponent)` for
/// `Gamma(u0 + kappa x)^e`.
fn block_factors<T: Real>(block: &Block<T>) -> Vec<(f64, f64, f64)> {
    let re = |e: &crate::model::SingleEntry<T>| e.c.re.to_f64_lossy();
    let mut out = Vec::new();
    for (j, e) in block.upper.iter().enumerate() {
        let (c, k, x) = (re(e), e.coeff.to_f64_lossy(), e.exp.to_f64_lossy());
        out.push(if j < block.n { (1.0 - c, k, x) } else { (c, -k, -x) });
    }
    for (j, e) in block.lower.iter().enumerate() {
        let (d, k, x) = (re(e), e.coeff.to_f64_lossy(), e.exp.to_f64_lossy());
        out.push(if j < block.m { (d, -k, x) } else { (1.0 - d, k, -x) });
    }
    out
}

/// Raw bounds of one block; `None` means unbounded on that side.
///
/// Only factors with positive effective exponent have poles. A factor
/// `Gamma(u0 + kappa x)` with `kappa > 0` has its poles left of
/// `-Re u0 / kappa`, with `kappa < 0` right of it.
pub(crate) fn block_bounds<T: Real>(block: &Block<T>) -> (Option<f64>, Option<f64>) {
    let mut lo: Option<f64> = None;
    let mut hi: Option<f64> = None;
    for (u0, k, e) in block_factors(block) {
        if e <= 0.0 || k == 0.0 {
            continue;
        }
        let b = -u0 / k;
        if k > 0.0 {
            lo = Some(lo.map_or(b, |l| l.max(b)));
        } else {
            hi = Some(hi.map_or(b, |h| h.min(b)));
        }
    }
    (lo, hi)
}

/// Strip of one block, capped to finite width.
pub(crate) fn block_strip<T: Real>(block: &Block<T>, var: Var) -> Result<Strip> {
    let (lo, hi) = block_bounds(block);
    let s = match (lo, hi) {
        (Some(l), Some(h)) => Strip { lo: l, hi: h },
        (Some(l), None) => Strip { lo: l, hi: l + CAP },
        (None, Some(h)) => Strip { lo: h - CAP, hi: h },
        (None, None) => Strip { lo: -1.0, hi: 1.0 },
    };
    if !(s.lo < s.hi) {
        return Err(Error::EmptyStrip { var, lo: s.lo, hi: s.hi });
    }
    Ok(s)
}

/// Half-plane `g . x <= b`.
#[derive(Debug, Clone, Copy)]
struct Half {
    g: [f64; 2],
    b: f64,
}

fn box_halves(s1: Strip, s2: Strip) -> Vec<Half> {
    vec![
        Half { g: [1.0, 0.0], b: s1.hi },
        Half { g: [-1.0, 0.0], b: -s1.lo },
        Half { g: [0.0, 1.0], b: s2.hi },
        Half { g: [0.0, -1.0], b: -s2.lo },
    ]
}

fn solve3(m: [[f64; 3]; 3], rhs: [f64; 3]) -> Option<[f64; 3]> {
    let det = |a: [[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let d = det(m);
    if d.abs() < 1e-14 {
        return None;
    }
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        let mut mk = m;
        for i in 0..3 {
            mk[i][k] = rhs[i];
        }
        *o = det(mk) / d;
    }
    Some(out)
}

/// Largest inscribed disc by enumerating LP vertices in `(x1, x2, r)`.
fn chebyshev_center(halves: &[Half]) -> Option<([f64; 2], f64)> {
    // rows: g.x + r |g| <= b, plus -r <= 0
    let mut rows: Vec<([f64; 3], f64)> =
        halves.iter().map(|h| ([h.g[0], h.g[1], h.g[0].hypot(h.g[1])], h.b)).collect();
    rows.push(([0.0, 0.0, -1.0], 0.0));
    let n = rows.len();
    let mut best: Option<([f64; 2], f64)> = None;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let m = [rows[i].0, rows[j].0, rows[k].0];
                let Some(v) = solve3(m, [rows[i].1, rows[j].1, rows[k].1]) else { continue };
                let feasible = rows
                    .iter()
                    .all(|(g, b)| g[0] * v[0] + g[1] * v[1] + g[2] * v[2] <= b + 1e-10 * (1.0 + b.abs()));
                if feasible && best.is_none_or(|(_, r)| v[2] > r) {
                    best = Some(([v[0], v[1]], v[2]));
                }
            }
        }
    }
    best
}

/// Analytic center of `{g_i . x < b_i}` by damped Newton on the log barrier.
fn analytic_center(halves: &[Half], start: [f64; 2]) -> [f64; 2] {
    let slack = |x: [f64; 2], h: &Half| h.b - h.g[0] * x[0] - h.g[1] * x[1];
    let barrier = |x: [f64; 2]| -> Option<f64> {
        let mut f = 0.0;
        for h in halves {
            let s = slack(x, h);
            if s <= 0.0 {
                return None;
            }
            f -= s.ln();
        }
        Some(f)
    };
    let mut x = start;
    for _ in 0..60 {
        let mut grad = [0.0; 2];
        let mut hess = [[0.0; 2]; 2];
        for h in halves {
            let s = slack(x, h);
            for a in 0..2 {
                grad[a] += h.g[a] / s;
                for b in 0..2 {
                    hess[a][b] += h.g[a] * h.g[b] / (s * s);
                }
            }
        }
        let det = hess[0][0] * hess[1][1] - hess[0][1] * hess[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let step = [
            -(hess[1][1] * grad[0] - hess[0][1] * grad[1]) / det,
            -(-hess[1][0] * grad[0] + hess[0][0] * grad[1]) / det,
        ];
        let decrement = -(grad[0] * step[0] + grad[1] * step[1]);
        if decrement < 1e-24 {
            break;
        }
        let f0 = barrier(x).unwrap_or(f64::INFINITY);
        let mut t = 1.0;
        loop {
            let cand = [x[0] + t * step[0], x[1] + t * step[1]];
            if let Some(f) = barrier(cand) {
                if f <= f0 - 0.25 * t * decrement {
                    x = cand;
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-12 {
                return x;
            }
        }
    }
    x
}

/// Joint gamma factors as `(Re u0, [kappa1, kappa2], effective exponent)`.
fn joint_factors<T: Real>(spec: &Spec2<T>) -> Vec<(f64, [f64; 2], f64)> {
    let mut out = Vec::new();
    for (j, e) in spec.upper_joint.iter().enumerate() {
        let (a, k1, k2, x) =
            (e.a.re.to_f64_lossy(), e.alpha.to_f64_lossy(), e.big_a.to_f64_lossy(), e.xi.to_f64_lossy());
        out.push(if j < spec.n1 { (1.0 - a, [k1, k2], x) } else { (a, [-k1, -k2], -x) });
    }
    for e in &spec.lower_joint {
        let (b, k1, k2, x) =
            (e.a.re.to_f64_lossy(), e.alpha.to_f64_lossy(), e.big_a.to_f64_lossy(), e.xi.to_f64_lossy());
        out.push((1.0 - b, [k1, k2], -x));
    }
    out
}

/// Abscissae `(sigma1, sigma2)` and the per-block strips.
///
/// Without joint numerator factors the abscissae are the strip midpoints.
/// Otherwise each joint factor with poles adds a half-plane (for the numerators
/// `alpha s1 + A s2 > Re a - 1`) and
/// the analytic center of the resulting polygon is used.
pub(crate) fn select_abscissae<T: Real>(spec: &Spec2<T>) -> Result<([f64; 2], [Strip; 2])> {
    let s1 = block_strip(&spec.z1_block, Var::Z1)?;
    let s2 = block_strip(&spec.z2_block, Var::Z2)?;
    let mut halves = box_halves(s1, s2);
    for (u0, k, e) in joint_factors(spec) {
        if e <= 0.0 {
            continue;
        }
        // u0 + k1 s1 + k2 s2 > 0
        let g = [-k[0], -k[1]];
        if g == [0.0, 0.0] {
            continue;
        }
        halves.push(Half { g, b: u0 });
    }
    if halves.len() == 4 {
        return Ok(([s1.mid(), s2.mid()], [s1, s2]));
    }
    match chebyshev_center(&halves) {
        Some((c, r)) if r > 1e-9 => Ok((analytic_center(&halves, c), [s1, s2])),
        _ => Err(Error::EmptyStrip { var: Var::Z1, lo: s1.lo, hi: s1.hi }),
    }
}

/// True when `(x1, x2)` strictly satisfies every separation constraint.
pub(crate) fn admissible<T: Real>(spec: &Spec2<T>, x: [f64; 2]) -> bool {
    let inside = |v: f64, (l, h): (Option<f64>, Option<f64>)| l.is_none_or(|l| v > l) && h.is_none_or(|h| v < h);
    inside(x[0], block_bounds(&spec.z1_block))
        && inside(x[1], block_bounds(&spec.z2_block))
        && joint_factors(spec)
            .into_iter()
            .all(|(u0, k, e)| e <= 0.0 || (k == [0.0, 0.0]) || u0 + k[0] * x[0] + k[1] * x[1] > 0.0)
}
