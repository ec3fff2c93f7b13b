//! Direct quadrature of the Mellin–Barnes integral along vertical lines.
//!
//! With `s = sigma_1 + i y_1`, `t = sigma_2 + i y_2` the integral becomes
//! `(2 pi)^-2` times a double integral over the real `y` plane. Each axis
//! gets a composite Gauss–Legendre rule on `[-T, T]`; panels double in
//! width outward but stay short where the integrand oscillates fast or a
//! gamma pole sits close to the line. The error estimate compares against
//! the rule with adjacent panels merged, plus a model of the truncated
//! tails.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::convergence::{arg_domain_widths, boundary_indices, classify, Verdict};
use crate::error::{Error, Result};
use crate::eval::{EvalResult, Method};
use crate::gamma::LogProduct;
use crate::kernel::{self, Blame, Factor};
use crate::model::{Block, EvalConfig, Spec1, Spec2, Var};
use crate::quadrature::{self, Rule, Singularity};
use crate::scalar::{principal_arg, principal_ln, Real};
use crate::strip::{self, Strip};

/// Nodes allowed along one axis.
pub const AXIS_BUDGET: usize = 1 << 21;
/// Integrand evaluations allowed for a non-separable double integral.
pub const GRID_BUDGET: usize = 1 << 24;
/// Grid nodes that may be screened by the cheap magnitude estimate.
pub const GRID_SCAN_BUDGET: usize = 1 << 27;
/// Largest kernel phase change per panel.
const PHASE_PER_PANEL: f64 = 8.0 * std::f64::consts::PI;
/// Times the truncation half-width may be doubled after the edge check.
const MAX_DOUBLINGS: usize = 4;
/// `|kappa|` below this counts as the sector edge.
const EDGE_KAPPA: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourChoice {
    pub sigma1: f64,
    pub sigma2: f64,
    pub strip1: (f64, f64),
    pub strip2: (f64, f64),
    pub t1: f64,
    pub t2: f64,
}

fn delta_halfwidth<T: Real>(delta: T, var: Var, cfg: &EvalConfig<T>) -> Result<f64> {
    if let Some(h) = cfg.contour_halfwidth {
        return Ok(h.to_f64_lossy());
    }
    let d = delta.to_f64_lossy();
    if d <= 0.0 {
        return Err(Error::NonDecaying { var, delta: d });
    }
    Ok(-cfg.tol_rel.to_f64_lossy().ln() / (std::f64::consts::FRAC_PI_2 * d))
}

/// Abscissae, strips and the argument-free truncation `exp(-pi Delta T / 2) < tol`.
pub fn select_contour<T: Real>(spec: &Spec2<T>, cfg: &EvalConfig<T>) -> Result<ContourChoice> {
    let (sig, strips) = strip::select_abscissae(spec)?;
    let (d1, d2) = arg_domain_widths(spec);
    Ok(ContourChoice {
        sigma1: sig[0],
        sigma2: sig[1],
        strip1: (strips[0].lo, strips[0].hi),
        strip2: (strips[1].lo, strips[1].hi),
        t1: delta_halfwidth(d1, Var::Z1, cfg)?,
        t2: delta_halfwidth(d2, Var::Z2, cfg)?,
    })
}

/// Nearest pole (or branch point) of a factor to the line `Re x = sigma`,
/// in the `y` plane. `other` is the real part contributed by the second
/// variable for joint factors.
fn nearest_singularity<T: Real>(f: &Factor<T>, sigma: f64, other: f64) -> Option<Singularity> {
    let e = f.e.to_f64_lossy();
    if e < 0.0 && e.fract() == 0.0 {
        return None;
    }
    let k = f.ks.to_f64_lossy();
    if k == 0.0 {
        return None;
    }
    let (ur, ui) = (f.u0.re.to_f64_lossy() + other, f.u0.im.to_f64_lossy());
    // x_j = (-j - u0) / k, j = 0, 1, ...
    let j0 = (-ur - k * sigma).round().max(0.0);
    let mut best: Option<Singularity> = None;
    for j in [j0 - 1.0, j0, j0 + 1.0] {
        if j < 0.0 {
            continue;
        }
        let re = (-j - ur) / k;
        let cand = Singularity { eta: -ui / k, delta: (re - sigma).abs() };
        if best.is_none_or(|b| cand.delta < b.delta) {
            best = Some(cand);
        }
    }
    best
}

/// Per-axis integration data.
struct Axis<T> {
    var: Var,
    sigma: f64,
    lnw: Complex<T>,
    factors: Vec<Factor<T>>,
    /// Decay rate on the slow side.
    kappa: f64,
    /// Algebraic decay exponent.
    q: f64,
    /// Unsigned phase contributions of joint factors: (|e k|, other-axis scale).
    joint_phase: Vec<(f64, f64)>,
    /// Width cap from joint singularities.
    joint_cap: f64,
    t_max: f64,
}

impl<T: Real> Axis<T> {
    fn x(&self, y: f64) -> Complex<T> {
        Complex::new(T::lit(self.sigma), T::lit(y))
    }

    /// Local phase rate of the integrand along the axis.
    fn omega(&self, y: f64) -> f64 {
        let x = Complex::new(self.sigma, y);
        let mut signed = self.lnw.re.to_f64_lossy();
        let mut unsigned = 1.0;
        for f in &self.factors {
            let (e, k) = (f.e.to_f64_lossy(), f.ks.to_f64_lossy());
            let u = Complex::new(f.u0.re.to_f64_lossy(), f.u0.im.to_f64_lossy()) + x * k;
            let r = u.norm().max(0.5);
            signed += e * k * r.ln();
            unsigned += (e * k).abs() / r;
        }
        for &(ek, other) in &self.joint_phase {
            unsigned += ek * (2.0 + y.abs() + other).ln();
        }
        signed.abs() + unsigned
    }

    fn arg(&self) -> f64 {
        self.lnw.im.to_f64_lossy().abs()
    }

    fn far_phase(&self) -> f64 {
        let mut v = self.lnw.re.to_f64_lossy();
        for f in &self.factors {
            let (e, k) = (f.e.to_f64_lossy(), f.ks.to_f64_lossy());
            v += e * k * k.abs().ln();
        }
        v.abs()
    }

    fn singularities(&self) -> Vec<Singularity> {
        self.factors.iter().filter_map(|f| nearest_singularity(f, self.sigma, 0.0)).collect()
    }

    fn panels(&self, t_max: f64, cfg_panels: Option<usize>) -> Result<(Vec<(f64, f64)>, Vec<(f64, f64)>)> {
        if let Some(n) = cfg_panels {
            let n = n.max(1);
            return Ok((quadrature::uniform_panels(t_max, -1.0, n), quadrature::uniform_panels(t_max, 1.0, n)));
        }
        let sing = self.singularities();
        let joint_cap = self.joint_cap;
        let cap = |y: f64| (PHASE_PER_PANEL / self.omega(y)).min(joint_cap);
        let first = (std::f64::consts::FRAC_PI_2 / self.omega(0.0)).min(joint_cap);
        let budget = AXIS_BUDGET / quadrature::GL_NODES / 2;
        let over = || Error::QuadratureBudget { var: self.var, nodes: usize::MAX, budget: AXIS_BUDGET };
        let neg = quadrature::half_axis_panels(t_max, -1.0, first, &cap, &sing, budget).ok_or_else(over)?;
        let pos = quadrature::half_axis_panels(t_max, 1.0, first, &cap, &sing, budget).ok_or_else(over)?;
        Ok((neg, pos))
    }

    fn ln_integrand(&self, y: f64, tol: T) -> Result<LogProduct<T>> {
        let x = self.x(y);
        let mut lp = kernel::ln_product(&self.factors, x, Complex::new(T::zero(), T::zero()), tol, Blame::Kernel)?;
        lp.sum += x * self.lnw;
        Ok(lp)
    }

    /// Tail mass beyond `T` relative to the integrand size there.
    fn tail_length(&self, t_max: f64) -> f64 {
        if self.kappa > EDGE_KAPPA {
            1.0 / self.kappa
        } else {
            let osc = self.far_phase();
            if osc > 0.05 {
                2.0 / osc
            } else {
                t_max / (self.q - 1.0).max(1e-3)
            }
        }
    }
}

/// Slowest decay rate met on the edges `|y_k| = T` of the integration box.
///
/// The exponent `-ln|integrand| ~ pi/2 sum e |ks y1 + kt y2| - y . arg w` is
/// piecewise linear and homogeneous, so on the edge `y1 = 1` its minimum over
/// `y2` sits where a joint factor's imaginary part cancels, or at `y2 = 0`.
/// Joint factors thus slow the decay below the per-axis `Delta` value.
fn directional_kappa<T: Real>(b1: &[Factor<T>], b2: &[Factor<T>], joint: &[Factor<T>], arg: [f64; 2]) -> [f64; 2] {
    let f = |x: T| x.to_f64_lossy();
    let mut terms: Vec<(f64, f64, f64)> = Vec::new();
    terms.extend(b1.iter().map(|g| (f(g.e), f(g.ks), 0.0)));
    terms.extend(b2.iter().map(|g| (f(g.e), 0.0, f(g.ks))));
    terms.extend(joint.iter().map(|g| (f(g.e), f(g.ks), f(g.kt))));
    let rate = |y1: f64, y2: f64| {
        let s: f64 = terms.iter().map(|&(e, a, b)| e * (a * y1 + b * y2).abs()).sum();
        std::f64::consts::FRAC_PI_2 * s - arg[0] * y1.abs() - arg[1] * y2.abs()
    };
    let mut out = [f64::INFINITY; 2];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut cands = vec![0.0];
        for g in joint {
            let (mine, theirs) = if k == 0 { (f(g.ks), f(g.kt)) } else { (f(g.kt), f(g.ks)) };
            if theirs != 0.0 {
                cands.push(-mine / theirs);
            }
        }
        for v in cands {
            let r = if k == 0 { rate(1.0, v) } else { rate(v, 1.0) };
            *slot = slot.min(r);
        }
    }
    out
}

/// Decay rates of the integrand on the far edges `|y_1| = T` and `|y_2| = T`
/// at `(z1, z2)`, per unit `T`. With joint factors these can be far below
/// `pi Delta / 2 - |arg w|`; quadrature cost grows like their inverse squared.
pub fn decay_rates<T: Real>(spec: &Spec2<T>, z1: Complex<T>, z2: Complex<T>) -> [f64; 2] {
    let (w1, w2) = spec.effective_args(z1, z2);
    let arg = [principal_arg(w1).to_f64_lossy().abs(), principal_arg(w2).to_f64_lossy().abs()];
    let b1 = kernel::block_factors(&spec.z1_block, Var::Z1);
    let b2 = kernel::block_factors(&spec.z2_block, Var::Z2);
    directional_kappa(&b1, &b2, &kernel::joint_factors(spec), arg)
}

/// Truncation half-width for one axis.
fn halfwidth(kappa: f64, q: f64, osc: f64, var: Var, delta: f64, tol: f64) -> Result<f64> {
    if kappa > EDGE_KAPPA {
        let l = (1e3 / tol).ln();
        let mut t = (l / kappa).max(1.0);
        for _ in 0..20 {
            t = ((l - q * t.ln()) / kappa).max(1.0);
        }
        return Ok(t);
    }
    if kappa < -EDGE_KAPPA || q <= 1.0 {
        return Err(Error::NonDecaying { var, delta });
    }
    let t = if osc > 0.05 { (1.0 / (osc * tol)).powf(1.0 / q) } else { (1.0 / ((q - 1.0) * tol)).powf(1.0 / (q - 1.0)) };
    Ok(t.max(1.0))
}

struct AxisParams {
    delta: f64,
    mu: f64,
    omega: f64,
}

#[allow(clippy::too_many_arguments)]
fn build_axis<T: Real>(
    var: Var,
    block: &Block<T>,
    joint: &[Factor<T>],
    sigma: [f64; 2],
    w: Complex<T>,
    p: AxisParams,
    other_t: f64,
    cfg: &EvalConfig<T>,
) -> Result<Axis<T>> {
    let idx = var.index();
    let arg = principal_arg(w).to_f64_lossy().abs();
    let kappa = std::f64::consts::FRAC_PI_2 * p.delta - arg;
    let q = p.omega - sigma[idx] * p.mu;
    // joint factors seen from this axis
    let mut joint_phase = Vec::new();
    let mut joint_cap = f64::INFINITY;
    for f in joint {
        let (ks, kt) = (f.ks.to_f64_lossy(), f.kt.to_f64_lossy());
        let (mine, theirs) = if idx == 0 { (ks, kt) } else { (kt, ks) };
        let e = f.e.to_f64_lossy();
        joint_phase.push(((e * mine).abs(), theirs.abs() * other_t));
        if mine != 0.0 {
            let g = Factor {
                u0: f.u0,
                ks: T::lit(mine),
                kt: T::zero(),
                e: f.e,
                entry: f.entry,
            };
            if let Some(sg) = nearest_singularity(&g, sigma[idx], theirs * sigma[1 - idx]) {
                joint_cap = joint_cap.min(4.0 * sg.delta);
            }
        }
    }
    let mut axis = Axis {
        var,
        sigma: sigma[idx],
        lnw: principal_ln(w),
        factors: kernel::block_factors(block, var),
        kappa,
        q,
        joint_phase,
        joint_cap,
        t_max: 0.0,
    };
    axis.t_max = match cfg.contour_halfwidth {
        Some(h) => h.to_f64_lossy(),
        None => halfwidth(kappa, q, axis.far_phase(), var, p.delta, cfg.tol_rel.to_f64_lossy())?,
    };
    Ok(axis)
}

struct AxisSum<T> {
    value: Complex<T>,
    edge_mass: f64,
    edge_max: f64,
    nodes: usize,
}

fn axis_sum<T: Real>(axis: &Axis<T>, rule: &Rule, tol: T) -> Result<AxisSum<T>> {
    let inv = T::one() / T::TAU();
    let vals: Vec<(Complex<T>, bool)> = rule
        .nodes
        .par_iter()
        .zip(rule.weights.par_iter())
        .zip(rule.edge.par_iter())
        .map(|((&y, &w), &edge)| Ok((axis.ln_integrand(y, tol)?.value() * T::lit(w) * inv, edge)))
        .collect::<Result<_>>()?;
    let mut value = Complex::new(T::zero(), T::zero());
    let mut edge_mass = 0.0;
    for &(v, edge) in &vals {
        value += v;
        if edge {
            edge_mass += v.norm().to_f64_lossy();
        }
    }
    let e1 = axis.ln_integrand(-axis.t_max, tol)?.value().norm().to_f64_lossy();
    let e2 = axis.ln_integrand(axis.t_max, tol)?.value().norm().to_f64_lossy();
    Ok(AxisSum { value, edge_mass, edge_max: e1.max(e2) / std::f64::consts::TAU, nodes: rule.len() })
}

struct Layout {
    fine: Rule,
    coarse: Rule,
}

fn layout<T: Real>(axis: &Axis<T>, cfg: &EvalConfig<T>) -> Result<Layout> {
    let (neg, pos) = axis.panels(axis.t_max, cfg.contour_panels)?;
    let fine = quadrature::composite(&neg, &pos);
    if fine.len() > AXIS_BUDGET {
        return Err(Error::QuadratureBudget { var: axis.var, nodes: fine.len(), budget: AXIS_BUDGET });
    }
    let coarse = quadrature::composite(&quadrature::merge_pairs(&neg), &quadrature::merge_pairs(&pos));
    Ok(Layout { fine, coarse })
}

/// One-dimensional integral with the a-posteriori truncation check.
fn integrate_axis<T: Real>(axis: &mut Axis<T>, cfg: &EvalConfig<T>) -> Result<(Complex<T>, f64, f64, usize)> {
    let tol = cfg.tol_rel.to_f64_lossy();
    let mut doublings = 0;
    loop {
        let lay = layout(axis, cfg)?;
        let fine = axis_sum(axis, &lay.fine, cfg.pole_tol)?;
        let coarse = axis_sum(axis, &lay.coarse, cfg.pole_tol)?;
        let quad = (fine.value - coarse.value).norm().to_f64_lossy();
        let mag = fine.value.norm().to_f64_lossy();
        let adaptive = cfg.contour_halfwidth.is_none() && axis.kappa > EDGE_KAPPA;
        if adaptive && doublings < MAX_DOUBLINGS && fine.edge_mass > 0.1 * tol * mag {
            axis.t_max *= 2.0;
            doublings += 1;
            continue;
        }
        let tail = fine.edge_max * axis.tail_length(axis.t_max);
        return Ok((fine.value, quad, tail, fine.nodes + coarse.nodes));
    }
}

fn finish<T: Real>(value: Complex<T>, quad: f64, tail: f64, nodes: usize, cfg: &EvalConfig<T>, warnings: Vec<String>) -> Result<EvalResult<T>> {
    let tol = cfg.tol_rel.to_f64_lossy();
    let mag = value.norm().to_f64_lossy();
    if !(quad <= 10.0 * tol * mag.max(f64::MIN_POSITIVE)) && quad > 0.0 {
        return Err(Error::AccuracyNotReached { estimate: quad, target: 10.0 * tol * mag });
    }
    Ok(EvalResult {
        value,
        abs_err_est: T::lit(quad + tail),
        terms_used: nodes.max(1),
        rings_used: 0,
        method: Method::Contour,
        warnings,
    })
}

fn gate<T: Real>(spec: &Spec2<T>, z1: Complex<T>, z2: Complex<T>, cfg: &EvalConfig<T>) -> Result<Vec<String>> {
    let rep = classify(spec, z1, z2, cfg)?;
    let mut warnings = Vec::new();
    for (v, var) in [(rep.verdict_z1, Var::Z1), (rep.verdict_z2, Var::Z2)] {
        if v == Verdict::NotEstablished {
            if !cfg.force_contour {
                return Err(Error::NotEstablished);
            }
            warnings.push(format!("convergence along {var} not established; forced"));
        }
    }
    Ok(warnings)
}

/// Contour value at `(z1, z2)` on automatically chosen lines.
pub fn eval_contour<T: Real>(spec: &Spec2<T>, z1: Complex<T>, z2: Complex<T>, cfg: &EvalConfig<T>) -> Result<EvalResult<T>> {
    let (sig, _) = strip::select_abscissae(spec)?;
    eval_contour_at(spec, z1, z2, sig, cfg)
}

/// Contour value on the lines `Re s = sigma[0]`, `Re t = sigma[1]`.
pub fn eval_contour_at<T: Real>(
    spec: &Spec2<T>,
    z1: Complex<T>,
    z2: Complex<T>,
    sigma: [f64; 2],
    cfg: &EvalConfig<T>,
) -> Result<EvalResult<T>> {
    cfg.check()?;
    let warnings = gate(spec, z1, z2, cfg)?;
    if !strip::admissible(spec, sigma) {
        let s = strip::block_strip(&spec.z1_block, Var::Z1).unwrap_or(Strip { lo: f64::NAN, hi: f64::NAN });
        return Err(Error::EmptyStrip { var: Var::Z1, lo: s.lo, hi: s.hi });
    }
    let (w1, w2) = spec.effective_args(z1, z2);
    let (d1, d2) = arg_domain_widths(spec);
    let (mu1, mu2, om1, om2) = boundary_indices(spec);
    let f = |x: T| x.to_f64_lossy();
    let joint = kernel::joint_factors(spec);
    let (p1d, p2d) = (f(d1), f(d2));
    let p1 = AxisParams { delta: p1d, mu: f(mu1), omega: f(om1) };
    let p2 = AxisParams { delta: p2d, mu: f(mu2), omega: f(om2) };
    // the joint phase bound needs the other axis' extent; use the Delta-only guess
    let guess = |d: T| delta_halfwidth(d, Var::Z1, cfg).unwrap_or(10.0);
    let mut a1 = build_axis(Var::Z1, &spec.z1_block, &joint, sigma, w1, p1, guess(d2), cfg)?;
    let mut a2 = build_axis(Var::Z2, &spec.z2_block, &joint, sigma, w2, p2, guess(d1), cfg)?;
    if !joint.is_empty() && cfg.contour_halfwidth.is_none() {
        let kap = directional_kappa(&a1.factors, &a2.factors, &joint, [a1.arg(), a2.arg()]);
        let tol = cfg.tol_rel.to_f64_lossy();
        for (a, k, d) in [(&mut a1, kap[0], p1d), (&mut a2, kap[1], p2d)] {
            if k < a.kappa {
                a.kappa = k;
                a.t_max = halfwidth(k, a.q, a.far_phase(), a.var, d, tol)?;
            }
        }
    }

    if joint.is_empty() {
        let (v1, q1, t1, n1) = integrate_axis(&mut a1, cfg)?;
        let (v2, q2, t2, n2) = integrate_axis(&mut a2, cfg)?;
        let (m1, m2) = (f(v1.norm()), f(v2.norm()));
        let quad = m1 * q2 + m2 * q1 + q1 * q2;
        let tail = m1 * t2 + m2 * t1 + t1 * t2;
        return finish(v1 * v2, quad, tail, n1 + n2, cfg, warnings);
    }
    integrate_grid(spec, &joint, &mut a1, &mut a2, cfg, warnings)
}

struct GridSum<T> {
    value: Complex<T>,
    edge_mass: [f64; 2],
    evaluated: usize,
}

/// Stirling estimate of `e ln|Gamma(u)|`, or `None` where it cannot be trusted.
fn stirling_mag(u: Complex<f64>, e: f64) -> Option<f64> {
    let r = u.norm();
    if r < 5.0 || (e > 0.0 && u.re < 0.0 && u.im.abs() < 1.0) {
        return None;
    }
    let l = (u - 0.5) * u.ln() - u;
    Some(e * (l.re + 0.5 * std::f64::consts::TAU.ln()))
}

/// Estimated log magnitude of a weighted grid node from the exact block
/// parts `ls + lt` and an asymptotic joint part.
fn node_estimate<T: Real>(joint: &[Factor<T>], s: Complex<f64>, t: Complex<f64>, ls: f64, lt: f64) -> Option<f64> {
    let mut acc = ls + lt;
    for f in joint {
        let u0 = Complex::new(f.u0.re.to_f64_lossy(), f.u0.im.to_f64_lossy());
        let u = u0 + s * f.ks.to_f64_lossy() + t * f.kt.to_f64_lossy();
        acc += stirling_mag(u, f.e.to_f64_lossy())?;
    }
    Some(acc)
}

fn grid_sum<T: Real>(
    joint: &[Factor<T>],
    a1: &Axis<T>,
    a2: &Axis<T>,
    r1: &Rule,
    r2: &Rule,
    tol: T,
    tol_rel: f64,
) -> Result<GridSum<T>> {
    let total = r1.len().saturating_mul(r2.len());
    if total > GRID_SCAN_BUDGET {
        return Err(Error::QuadratureBudget { var: Var::Z1, nodes: total, budget: GRID_SCAN_BUDGET });
    }
    let pre = |a: &Axis<T>, r: &Rule| -> Result<Vec<(Complex<T>, LogProduct<T>, f64)>> {
        r.nodes
            .par_iter()
            .zip(r.weights.par_iter())
            .map(|(&y, &w)| {
                let lp = a.ln_integrand(y, tol)?;
                let lm = if lp.zero { f64::NEG_INFINITY } else { lp.sum.re.to_f64_lossy() + w.abs().ln() };
                Ok((a.x(y), lp, lm))
            })
            .collect()
    };
    let s_nodes = pre(a1, r1)?;
    let t_nodes = pre(a2, r2)?;
    let c64 = |z: Complex<T>| Complex::new(z.re.to_f64_lossy(), z.im.to_f64_lossy());
    // largest estimated node, then a cut-off that keeps the skipped total
    // far below tol times that node
    let peak = s_nodes
        .par_iter()
        .map(|(s, _, ls)| {
            let s = c64(*s);
            t_nodes.iter().filter_map(|(t, _, lt)| node_estimate(joint, s, c64(*t), *ls, *lt)).fold(f64::NEG_INFINITY, f64::max)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    let cut = peak + tol_rel.ln() - (total as f64).ln() - 3.0;
    let keep = |s: Complex<f64>, t: Complex<f64>, ls: f64, lt: f64| {
        ls > f64::NEG_INFINITY && lt > f64::NEG_INFINITY && node_estimate(joint, s, t, ls, lt).is_none_or(|e| e >= cut)
    };
    let evaluated: usize = s_nodes
        .par_iter()
        .map(|(s, _, ls)| {
            let s = c64(*s);
            t_nodes.iter().filter(|(t, _, lt)| keep(s, c64(*t), *ls, *lt)).count()
        })
        .sum();
    if evaluated > GRID_BUDGET {
        return Err(Error::QuadratureBudget { var: Var::Z1, nodes: evaluated, budget: GRID_BUDGET });
    }
    let scale = T::one() / (T::TAU() * T::TAU());
    let rows: Vec<(Complex<T>, f64, f64)> = (0..r1.len())
        .into_par_iter()
        .map(|i| -> Result<(Complex<T>, f64, f64)> {
            let (s, ref la, ls) = s_nodes[i];
            let mut acc = Complex::new(T::zero(), T::zero());
            let mut edge_t = 0.0;
            let mut mass = 0.0;
            let sf = c64(s);
            for (j, (t, lb, lt)) in t_nodes.iter().enumerate() {
                if !keep(sf, c64(*t), ls, *lt) {
                    continue;
                }
                let p = kernel::ln_product(joint, s, *t, tol, Blame::Kernel)?;
                if p.zero {
                    continue;
                }
                let v = (la.sum + lb.sum + p.sum).exp() * T::lit(r2.weights[j]);
                acc += v;
                let n = v.norm().to_f64_lossy();
                mass += n;
                if r2.edge[j] {
                    edge_t += n;
                }
            }
            let w = T::lit(r1.weights[i]) * scale;
            let wf = w.to_f64_lossy();
            Ok((acc * w, edge_t * wf, mass * wf))
        })
        .collect::<Result<_>>()?;
    let mut value = Complex::new(T::zero(), T::zero());
    let mut edge = [0.0, 0.0];
    for (i, (v, et, m)) in rows.iter().enumerate() {
        value += *v;
        edge[1] += et;
        if r1.edge[i] {
            edge[0] += m;
        }
    }
    Ok(GridSum { value, edge_mass: edge, evaluated })
}

fn integrate_grid<T: Real>(
    _spec: &Spec2<T>,
    joint: &[Factor<T>],
    a1: &mut Axis<T>,
    a2: &mut Axis<T>,
    cfg: &EvalConfig<T>,
    warnings: Vec<String>,
) -> Result<EvalResult<T>> {
    let tol = cfg.tol_rel.to_f64_lossy();
    let mut doublings = 0;
    let mut prev = None;
    loop {
        let l1 = layout(a1, cfg)?;
        let l2 = layout(a2, cfg)?;
        let fine = grid_sum(joint, a1, a2, &l1.fine, &l2.fine, cfg.pole_tol, tol)?;
        let mag = fine.value.norm().to_f64_lossy();
        // widening that no longer moves the value means the edge mass is noise
        let settled = prev.is_some_and(|p: Complex<T>| (fine.value - p).norm().to_f64_lossy() <= 0.1 * tol * mag);
        prev = Some(fine.value);
        let adaptive = cfg.contour_halfwidth.is_none();
        let mut grew = false;
        if adaptive && !settled && doublings < MAX_DOUBLINGS {
            for (k, a) in [&mut *a1, &mut *a2].into_iter().enumerate() {
                if a.kappa > EDGE_KAPPA && fine.edge_mass[k] > 0.1 * tol * mag {
                    a.t_max *= 2.0;
                    grew = true;
                }
            }
        }
        if grew {
            doublings += 1;
            continue;
        }
        let coarse = grid_sum(joint, a1, a2, &l1.coarse, &l2.coarse, cfg.pole_tol, tol)?;
        let quad = (fine.value - coarse.value).norm().to_f64_lossy();
        let tail: f64 = [(&*a1, fine.edge_mass[0]), (&*a2, fine.edge_mass[1])]
            .iter()
            .map(|(a, m)| {
                // edge-panel mass spread over the outermost panel length
                let lt = a.tail_length(a.t_max);
                m * lt / a.t_max.max(1.0)
            })
            .sum();
        let nodes = fine.evaluated + coarse.evaluated;
        return finish(fine.value, quad, tail, nodes, cfg, warnings);
    }
}

/// Contour value of a one-variable function.
pub fn eval_contour_1var<T: Real>(spec: &Spec1<T>, z: Complex<T>, cfg: &EvalConfig<T>) -> Result<EvalResult<T>> {
    cfg.check()?;
    if z == Complex::new(T::zero(), T::zero()) {
        return Err(Error::ZeroArgument { var: Var::Z1 });
    }
    let wrapped = Spec2 { z1_block: spec.block.clone(), negate: [spec.negate, false], ..Default::default() };
    let w = spec.effective_arg(z);
    let (d, _) = arg_domain_widths(&wrapped);
    let (mu, _, om, _) = boundary_indices(&wrapped);
    let edge = d * T::FRAC_PI_2();
    let arg = principal_arg(w).abs();
    let interior = d > T::zero() && arg < edge - cfg.boundary_radius_tol;
    let boundary = (arg - edge).abs() <= cfg.boundary_radius_tol;
    if !(interior || boundary || cfg.force_contour) {
        return Err(Error::NotEstablished);
    }
    let s = strip::block_strip(&spec.block, Var::Z1)?;
    let f = |x: T| x.to_f64_lossy();
    let p = AxisParams { delta: f(d), mu: f(mu), omega: f(om) };
    let mut a = build_axis(Var::Z1, &spec.block, &[], [s.mid(), 0.0], w, p, 0.0, cfg)?;
    let (v, q, t, n) = integrate_axis(&mut a, cfg)?;
    finish(v, q, t, n, cfg, Vec::new())
}
