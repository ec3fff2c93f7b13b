//! Structural rewrites between equivalent parameterizations, with a
//! numeric certification harness.
//!
//! Every rewrite states `ext(z) * I[z] = prefactor * I'[map(z)]`, where
//! `ext` is an optional external power of the effective arguments and
//! `map` acts on the effective arguments too (so negated specs transform
//! consistently).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::{evaluate, Method, MethodChoice};
use crate::gamma::gamma_pow;
use crate::kernel;
use crate::model::{Block, EntryRef, EvalConfig, JointEntry, SingleEntry, Spec2, Var};
use crate::scalar::{cplx, principal_arg, principal_ln, Real};

/// Rule identifiers `7.1` to `7.21`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleId(u8);

impl RuleId {
    pub const ALL: [RuleId; 21] = {
        let mut out = [RuleId(1); 21];
        let mut i = 0;
        while i < 21 {
            out[i] = RuleId(i as u8 + 1);
            i += 1;
        }
        out
    };

    pub fn new(n: u8) -> Option<Self> {
        (1..=21).contains(&n).then_some(Self(n))
    }

    pub fn number(self) -> u8 {
        self.0
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "7.{}", self.0)
    }
}

impl FromStr for RuleId {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.strip_prefix("7.")
            .and_then(|n| n.parse::<u8>().ok())
            .and_then(RuleId::new)
            .ok_or_else(|| format!("unknown rule '{s}' (expected 7.1 to 7.21)"))
    }
}

impl Serialize for RuleId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Action on one effective argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "k", rename_all = "kebab-case")]
pub enum ArgMap {
    Identity,
    Reciprocal,
    /// `w -> w^k` on the right-hand side.
    Power(f64),
    /// Left side multiplied by `w^k`; argument unchanged.
    ExternalPower(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rewrite<T> {
    pub rule: RuleId,
    pub prefactor: Complex<T>,
    pub arg_map: [ArgMap; 2],
    pub output: Spec2<T>,
    pub constraints_checked: Vec<String>,
}

impl<T: Real> Rewrite<T> {
    /// Right-hand-side arguments for left-hand-side `(z1, z2)`.
    pub fn map_args(&self, input: &Spec2<T>, z1: Complex<T>, z2: Complex<T>) -> (Complex<T>, Complex<T>) {
        let (w1, w2) = input.effective_args(z1, z2);
        let m = |w: Complex<T>, a: ArgMap| match a {
            ArgMap::Identity | ArgMap::ExternalPower(_) => w,
            ArgMap::Reciprocal => w.inv(),
            ArgMap::Power(k) => (principal_ln(w) * T::lit(k)).exp(),
        };
        let (v1, v2) = (m(w1, self.arg_map[0]), m(w2, self.arg_map[1]));
        let back = |v: Complex<T>, neg: bool| if neg { -v } else { v };
        (back(v1, self.output.negate[0]), back(v2, self.output.negate[1]))
    }

    /// Why `(z1, z2)` lies outside the region where the rewrite holds, if it does.
    ///
    /// `w^(k s) = (w^k)^s` needs `|k arg w| < pi` on the principal branch.
    pub fn off_branch(&self, input: &Spec2<T>, z1: Complex<T>, z2: Complex<T>) -> Option<String> {
        let (w1, w2) = input.effective_args(z1, z2);
        for (var, w, map) in [(Var::Z1, w1, self.arg_map[0]), (Var::Z2, w2, self.arg_map[1])] {
            if let ArgMap::Power(k) = map {
                if k == 1.0 {
                    continue;
                }
                let turn = principal_arg(w).to_f64_lossy().abs() * k;
                if turn >= std::f64::consts::PI {
                    return Some(format!("{var}: |k arg w| = {turn:.4} leaves the principal branch"));
                }
            }
        }
        None
    }

    /// Factor multiplying the left-hand side.
    pub fn external_factor(&self, input: &Spec2<T>, z1: Complex<T>, z2: Complex<T>) -> Complex<T> {
        let (w1, w2) = input.effective_args(z1, z2);
        let f = |w: Complex<T>, a: ArgMap| match a {
            ArgMap::ExternalPower(k) => (principal_ln(w) * T::lit(k)).exp(),
            _ => cplx(T::one()),
        };
        f(w1, self.arg_map[0]) * f(w2, self.arg_map[1])
    }
}

/// Parameters for [`apply_rule`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RuleArgs {
    /// Entry index for single-entry rules; `None` takes the first match.
    pub slot: Option<usize>,
    pub k1: Option<f64>,
    pub k2: Option<f64>,
}

fn identity_rewrite<T: Real>(rule: RuleId, output: Spec2<T>, prefactor: Complex<T>, maps: [ArgMap; 2], checked: Vec<String>) -> Rewrite<T> {
    Rewrite { rule, prefactor, arg_map: maps, output, constraints_checked: checked }
}

fn reflect<T: Real>(x: Complex<T>) -> Complex<T> {
    cplx(T::one()) - x
}

/// Reciprocal-argument form; needs no joint numerator factors.
pub fn rewrite_invert<T: Real>(spec: &Spec2<T>) -> Result<Rewrite<T>> {
    let rule = RuleId(1);
    if spec.n1 != 0 {
        return Err(Error::ConstraintViolated { rule: rule.to_string(), constraint: format!("n1 = {} != 0", spec.n1) });
    }
    let joint = |v: &[JointEntry<T>]| -> Vec<JointEntry<T>> {
        v.iter().map(|e| JointEntry { a: reflect(e.a), ..*e }).collect()
    };
    let single = |v: &[SingleEntry<T>]| -> Vec<SingleEntry<T>> {
        v.iter().map(|e| SingleEntry { c: reflect(e.c), ..*e }).collect()
    };
    let block = |b: &Block<T>| Block { m: b.n, n: b.m, upper: single(&b.lower), lower: single(&b.upper) };
    let output = Spec2 {
        n1: 0,
        upper_joint: joint(&spec.lower_joint),
        lower_joint: joint(&spec.upper_joint),
        z1_block: block(&spec.z1_block),
        z2_block: block(&spec.z2_block),
        negate: spec.negate,
    };
    Ok(identity_rewrite(rule, output, cplx(T::one()), [ArgMap::Reciprocal; 2], vec!["n1 = 0".into()]))
}

fn positive_k(rule: RuleId, k1: f64, k2: f64) -> Result<()> {
    if !(k1 > 0.0 && k2 > 0.0) || !k1.is_finite() || !k2.is_finite() {
        return Err(Error::Domain(format!("rule {rule} needs k1 > 0 and k2 > 0 (got {k1}, {k2})")));
    }
    Ok(())
}

/// Absorbs `w1^k1 w2^k2` into the parameters.
pub fn rewrite_power_shift<T: Real>(spec: &Spec2<T>, k1: f64, k2: f64) -> Result<Rewrite<T>> {
    let rule = RuleId(2);
    positive_k(rule, k1, k2)?;
    let (k1t, k2t) = (T::lit(k1), T::lit(k2));
    let mut out = spec.clone();
    for e in out.upper_joint.iter_mut().chain(out.lower_joint.iter_mut()) {
        e.a += cplx(k1t * e.alpha + k2t * e.big_a);
    }
    for (var, k) in [(Var::Z1, k1t), (Var::Z2, k2t)] {
        let b = out.block_mut(var);
        for e in b.upper.iter_mut().chain(b.lower.iter_mut()) {
            e.c += cplx(k * e.coeff);
        }
    }
    let checked = vec!["k1 > 0".into(), "k2 > 0".into()];
    Ok(identity_rewrite(rule, out, cplx(T::one()), [ArgMap::ExternalPower(k1), ArgMap::ExternalPower(k2)], checked))
}

/// Replaces `w` by `w^k`, scaling the Mellin coefficients.
pub fn rewrite_variable_power<T: Real>(spec: &Spec2<T>, k1: f64, k2: f64) -> Result<Rewrite<T>> {
    let rule = RuleId(3);
    positive_k(rule, k1, k2)?;
    let (k1t, k2t) = (T::lit(k1), T::lit(k2));
    let mut out = spec.clone();
    for e in out.upper_joint.iter_mut().chain(out.lower_joint.iter_mut()) {
        e.alpha *= k1t;
        e.big_a *= k2t;
    }
    for (var, k) in [(Var::Z1, k1t), (Var::Z2, k2t)] {
        let b = out.block_mut(var);
        for e in b.upper.iter_mut().chain(b.lower.iter_mut()) {
            e.coeff *= k;
        }
    }
    let checked = vec!["k1 > 0".into(), "k2 > 0".into()];
    let maps = if k1 == 1.0 && k2 == 1.0 { [ArgMap::Identity; 2] } else { [ArgMap::Power(k1), ArgMap::Power(k2)] };
    Ok(identity_rewrite(rule, out, cplx(k1t * k2t), maps, checked))
}

/// Where a single-entry rule looks.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Layer {
    JointUpper { numer: bool },
    JointLower,
    Upper { var: Var, numer: bool },
    Lower { var: Var, numer: bool },
}

impl Layer {
    fn len<T: Real>(self, s: &Spec2<T>) -> usize {
        match self {
            Layer::JointUpper { .. } => s.upper_joint.len(),
            Layer::JointLower => s.lower_joint.len(),
            Layer::Upper { var, .. } => s.block(var).upper.len(),
            Layer::Lower { var, .. } => s.block(var).lower.len(),
        }
    }

    /// Whether index `j` falls in this layer's part of the list.
    fn in_part<T: Real>(self, s: &Spec2<T>, j: usize) -> bool {
        match self {
            Layer::JointUpper { numer } => (j < s.n1) == numer,
            Layer::JointLower => true,
            Layer::Upper { var, numer } => (j < s.block(var).n) == numer,
            Layer::Lower { var, numer } => (j < s.block(var).m) == numer,
        }
    }

    fn entry(self, j: usize) -> EntryRef {
        match self {
            Layer::JointUpper { .. } => EntryRef::UpperJoint(j),
            Layer::JointLower => EntryRef::LowerJoint(j),
            Layer::Upper { var, .. } => EntryRef::Upper(var, j),
            Layer::Lower { var, .. } => EntryRef::Lower(var, j),
        }
    }

    /// Mellin coefficients at `j`: (s part, t part).
    fn coeffs<T: Real>(self, s: &Spec2<T>, j: usize) -> (T, T) {
        let z = T::zero();
        match self {
            Layer::JointUpper { .. } => (s.upper_joint[j].alpha, s.upper_joint[j].big_a),
            Layer::JointLower => (s.lower_joint[j].alpha, s.lower_joint[j].big_a),
            Layer::Upper { var, .. } => {
                let c = s.block(var).upper[j].coeff;
                if var == Var::Z1 { (c, z) } else { (z, c) }
            }
            Layer::Lower { var, .. } => {
                let c = s.block(var).lower[j].coeff;
                if var == Var::Z1 { (c, z) } else { (z, c) }
            }
        }
    }

    fn remove<T: Real>(self, s: &mut Spec2<T>, j: usize) {
        match self {
            Layer::JointUpper { numer } => {
                s.upper_joint.remove(j);
                if numer {
                    s.n1 -= 1;
                }
            }
            Layer::JointLower => {
                s.lower_joint.remove(j);
            }
            Layer::Upper { var, numer } => {
                let b = s.block_mut(var);
                b.upper.remove(j);
                if numer {
                    b.n -= 1;
                }
            }
            Layer::Lower { var, numer } => {
                let b = s.block_mut(var);
                b.lower.remove(j);
                if numer {
                    b.m -= 1;
                }
            }
        }
    }
}

/// Which coefficients must vanish for a single-entry rule.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Vanish {
    /// The `t` coefficient (entry independent of `z2`).
    Other,
    /// Both coefficients (constant factor).
    All,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Action {
    /// Constant factor leaves as a prefactor.
    Extract,
    /// Joint entry moves into the `z1` block.
    MoveToZ1,
}

struct SingleRule {
    layer: Layer,
    vanish: Vanish,
    action: Action,
    /// Index inequalities.
    index: &'static [Ineq],
    /// Gamma-argument condition.
    arg_label: Option<&'static str>,
}

/// Index quantity of a spec.
#[derive(Debug, Clone, Copy)]
enum Q {
    P1,
    Q1,
    N1,
    P(Var),
    Qb(Var),
    M(Var),
    N(Var),
}

impl Q {
    fn get<T: Real>(self, s: &Spec2<T>) -> i64 {
        (match self {
            Q::P1 => s.p1(),
            Q::Q1 => s.q1(),
            Q::N1 => s.n1,
            Q::P(v) => s.block(v).p(),
            Q::Qb(v) => s.block(v).q(),
            Q::M(v) => s.block(v).m,
            Q::N(v) => s.block(v).n,
        }) as i64
    }
}

/// `lhs + dl >= rhs + dr`.
struct Ineq {
    label: &'static str,
    lhs: Q,
    dl: i64,
    rhs: Option<Q>,
    dr: i64,
}

const fn ge(label: &'static str, lhs: Q, dl: i64, rhs: Option<Q>, dr: i64) -> Ineq {
    Ineq { label, lhs, dl, rhs, dr }
}

impl Ineq {
    fn holds<T: Real>(&self, s: &Spec2<T>) -> bool {
        self.lhs.get(s) + self.dl >= self.rhs.map_or(0, |q| q.get(s)) + self.dr
    }
}

use Var::{Z1, Z2};

const RULE4: [Ineq; 2] = [ge("p1 >= n1", Q::P1, 0, Some(Q::N1), 0), ge("n1 >= 1", Q::N1, 0, None, 1)];
const RULE5: [Ineq; 2] = [ge("p1 - 1 >= n1", Q::P1, -1, Some(Q::N1), 0), ge("n1 >= 0", Q::N1, 0, None, 0)];
const RULE6: [Ineq; 1] = [ge("q1 - 1 >= 0", Q::Q1, -1, None, 0)];
const RULE10: [Ineq; 2] = [ge("p2 >= n2", Q::P(Z1), 0, Some(Q::N(Z1)), 0), ge("n2 >= 1", Q::N(Z1), 0, None, 1)];
const RULE11: [Ineq; 2] = [ge("p2 - 1 >= n2", Q::P(Z1), -1, Some(Q::N(Z1)), 0), ge("n2 >= 0", Q::N(Z1), 0, None, 0)];
const RULE12: [Ineq; 2] = [ge("q2 >= m2", Q::Qb(Z1), 0, Some(Q::M(Z1)), 0), ge("m2 >= 1", Q::M(Z1), 0, None, 1)];
const RULE13: [Ineq; 2] = [ge("q2 - 1 >= m2", Q::Qb(Z1), -1, Some(Q::M(Z1)), 0), ge("m2 >= 0", Q::M(Z1), 0, None, 0)];
const RULE14: [Ineq; 2] = [ge("p3 >= n3", Q::P(Z2), 0, Some(Q::N(Z2)), 0), ge("n3 >= 1", Q::N(Z2), 0, None, 1)];
const RULE15: [Ineq; 2] = [ge("p3 - 1 >= n3", Q::P(Z2), -1, Some(Q::N(Z2)), 0), ge("n3 >= 0", Q::N(Z2), 0, None, 0)];
const RULE16: [Ineq; 2] = [ge("q3 >= m3", Q::Qb(Z2), 0, Some(Q::M(Z2)), 0), ge("m3 >= 1", Q::M(Z2), 0, None, 1)];
const RULE17: [Ineq; 2] = [ge("q3 - 1 >= m3", Q::Qb(Z2), -1, Some(Q::M(Z2)), 0), ge("m3 >= 0", Q::M(Z2), 0, None, 0)];

fn single_rule(n: u8) -> Option<SingleRule> {
    let ext = |layer, index, label| SingleRule { layer, vanish: Vanish::All, action: Action::Extract, index, arg_label: Some(label) };
    let mv = |layer, index| SingleRule { layer, vanish: Vanish::Other, action: Action::MoveToZ1, index, arg_label: None };
    Some(match n {
        4 => mv(Layer::JointUpper { numer: true }, &RULE4),
        5 => mv(Layer::JointUpper { numer: false }, &RULE5),
        6 => mv(Layer::JointLower, &RULE6),
        7 => ext(Layer::JointUpper { numer: true }, &RULE4, "Re(1-a) > 0"),
        8 => ext(Layer::JointUpper { numer: false }, &RULE5, "Re(a) > 0"),
        9 => ext(Layer::JointLower, &RULE6, "Re(1-b) > 0"),
        10 => ext(Layer::Upper { var: Z1, numer: true }, &RULE10, "Re(1-c) > 0"),
        11 => ext(Layer::Upper { var: Z1, numer: false }, &RULE11, "Re(c) > 0"),
        12 => ext(Layer::Lower { var: Z1, numer: true }, &RULE12, "Re(d) > 0"),
        13 => ext(Layer::Lower { var: Z1, numer: false }, &RULE13, "Re(1-d) > 0"),
        14 => ext(Layer::Upper { var: Z2, numer: true }, &RULE14, "Re(1-e) > 0"),
        15 => ext(Layer::Upper { var: Z2, numer: false }, &RULE15, "Re(e) > 0"),
        16 => ext(Layer::Lower { var: Z2, numer: true }, &RULE16, "Re(f) > 0"),
        17 => ext(Layer::Lower { var: Z2, numer: false }, &RULE17, "Re(1-f) > 0"),
        _ => return None,
    })
}

fn check_index<T: Real>(rule: RuleId, spec: &Spec2<T>, index: &[Ineq], checked: &mut Vec<String>) -> Result<()> {
    for q in index {
        if !q.holds(spec) {
            return Err(Error::ConstraintViolated { rule: rule.to_string(), constraint: format!("{} fails", q.label) });
        }
        checked.push(q.label.to_string());
    }
    Ok(())
}

fn matches_single<T: Real>(r: &SingleRule, spec: &Spec2<T>, j: usize) -> bool {
    if !r.layer.in_part(spec, j) {
        return false;
    }
    let (cs, ct) = r.layer.coeffs(spec, j);
    match r.vanish {
        Vanish::Other => ct == T::zero(),
        Vanish::All => cs == T::zero() && ct == T::zero(),
    }
}

fn apply_single<T: Real>(rule: RuleId, r: &SingleRule, spec: &Spec2<T>, slot: Option<usize>) -> Result<Rewrite<T>> {
    let len = r.layer.len(spec);
    let j = match slot {
        Some(j) if j >= len => {
            return Err(Error::PatternNotMatched { rule: rule.to_string(), detail: format!("slot {j} out of range (list has {len} entries)") })
        }
        Some(j) if !matches_single(r, spec, j) => {
            return Err(Error::PatternNotMatched {
                rule: rule.to_string(),
                detail: format!("{} does not have the required form", r.layer.entry(j)),
            })
        }
        Some(j) => j,
        None => (0..len).find(|&j| matches_single(r, spec, j)).ok_or_else(|| Error::PatternNotMatched {
            rule: rule.to_string(),
            detail: "no entry has the required form".into(),
        })?,
    };
    let mut checked = Vec::new();
    check_index(rule, spec, r.index, &mut checked)?;
    let mut out = spec.clone();
    let mut prefactor = cplx(T::one());
    match r.action {
        Action::Extract => {
            // the factor at s = t = 0 is exactly Gamma(u0)^e
            let entry = r.layer.entry(j);
            let f = kernel::joint_factors(spec)
                .into_iter()
                .chain(kernel::block_factors(&spec.z1_block, Var::Z1))
                .chain(kernel::block_factors(&spec.z2_block, Var::Z2))
                .find(|f| f.entry == entry);
            if let Some(f) = f {
                let label = r.arg_label.unwrap_or("argument > 0");
                if f.u0.re <= T::zero() {
                    let c = label.replace("> 0", "<= 0");
                    return Err(Error::ConstraintViolated { rule: rule.to_string(), constraint: c });
                }
                checked.push(label.to_string());
                prefactor = gamma_pow(f.u0, f.e)?;
            }
            // a removed zero-exponent entry contributes 1
            r.layer.remove(&mut out, j);
        }
        Action::MoveToZ1 => {
            let moved = match r.layer {
                Layer::JointUpper { .. } => spec.upper_joint[j],
                _ => spec.lower_joint[j],
            };
            let e = SingleEntry { c: moved.a, coeff: moved.alpha, exp: moved.xi };
            r.layer.remove(&mut out, j);
            let b = &mut out.z1_block;
            match r.layer {
                Layer::JointUpper { numer: true } => {
                    b.upper.insert(0, e);
                    b.n += 1;
                }
                Layer::JointUpper { numer: false } => b.upper.push(e),
                _ => b.lower.push(e),
            }
        }
    }
    Ok(identity_rewrite(rule, out, prefactor, [ArgMap::Identity; 2], checked))
}

/// Pair position inside a list.
#[derive(Debug, Clone, Copy)]
enum Pos {
    First,
    Last,
}

impl Pos {
    fn resolve(self, len: usize) -> Option<usize> {
        match (self, len) {
            (_, 0) => None,
            (Pos::First, _) => Some(0),
            (Pos::Last, n) => Some(n - 1),
        }
    }
}

/// Duplicate pair that cancels: an upper-list entry and a lower-list entry.
#[derive(Debug, Clone, Copy)]
enum Pair {
    Joint { upper: Pos, lower: Pos },
    Block { var: Var, upper: Pos, lower: Pos },
}

struct CancelRule {
    pairs: &'static [Pair],
    index: &'static [Ineq],
}

const PAIRS_18: [Pair; 3] = [
    Pair::Joint { upper: Pos::First, lower: Pos::Last },
    Pair::Block { var: Z1, upper: Pos::First, lower: Pos::Last },
    Pair::Block { var: Z2, upper: Pos::First, lower: Pos::Last },
];
const PAIRS_19: [Pair; 2] = [
    Pair::Block { var: Z1, upper: Pos::Last, lower: Pos::First },
    Pair::Block { var: Z2, upper: Pos::Last, lower: Pos::First },
];
const PAIRS_21: [Pair; 3] = [
    Pair::Joint { upper: Pos::First, lower: Pos::First },
    Pair::Block { var: Z1, upper: Pos::First, lower: Pos::Last },
    Pair::Block { var: Z2, upper: Pos::First, lower: Pos::Last },
];
const INDEX_18: [Ineq; 9] = [
    ge("p1 >= n1", Q::P1, 0, Some(Q::N1), 0),
    ge("n1 >= 1", Q::N1, 0, None, 1),
    ge("p2 >= n2", Q::P(Z1), 0, Some(Q::N(Z1)), 0),
    ge("n2 >= 1", Q::N(Z1), 0, None, 1),
    ge("p3 >= n3", Q::P(Z2), 0, Some(Q::N(Z2)), 0),
    ge("n3 >= 1", Q::N(Z2), 0, None, 1),
    ge("q1 >= 1", Q::Q1, 0, None, 1),
    ge("q2 >= m2 + 1", Q::Qb(Z1), 0, Some(Q::M(Z1)), 1),
    ge("q3 >= m3 + 1", Q::Qb(Z2), 0, Some(Q::M(Z2)), 1),
];
const INDEX_19: [Ineq; 8] = [
    ge("q1 >= 1", Q::Q1, 0, None, 1),
    ge("q2 >= m2", Q::Qb(Z1), 0, Some(Q::M(Z1)), 0),
    ge("m2 >= 1", Q::M(Z1), 0, None, 1),
    ge("q3 >= m3", Q::Qb(Z2), 0, Some(Q::M(Z2)), 0),
    ge("m3 >= 1", Q::M(Z2), 0, None, 1),
    ge("p1 >= n1 + 1", Q::P1, 0, Some(Q::N1), 1),
    ge("p2 >= n2 + 1", Q::P(Z1), 0, Some(Q::N(Z1)), 1),
    ge("p3 >= n3 + 1", Q::P(Z2), 0, Some(Q::N(Z2)), 1),
];
const INDEX_20: [Ineq; 6] = [
    ge("p2 >= n2 + 1", Q::P(Z1), 0, Some(Q::N(Z1)), 1),
    ge("p3 >= n3 + 1", Q::P(Z2), 0, Some(Q::N(Z2)), 1),
    ge("q2 >= m2", Q::Qb(Z1), 0, Some(Q::M(Z1)), 0),
    ge("q3 >= m3", Q::Qb(Z2), 0, Some(Q::M(Z2)), 0),
    // the leading lower entry must be a numerator to cancel
    ge("m2 >= 1", Q::M(Z1), 0, None, 1),
    ge("m3 >= 1", Q::M(Z2), 0, None, 1),
];
const INDEX_21: [Ineq; 9] = [
    ge("p1 - 1 >= n1", Q::P1, -1, Some(Q::N1), 0),
    // the leading upper joint entry must be a numerator to cancel
    ge("n1 >= 1", Q::N1, 0, None, 1),
    ge("q1 >= 1", Q::Q1, 0, None, 1),
    ge("p2 >= n2", Q::P(Z1), 0, Some(Q::N(Z1)), 0),
    ge("n2 >= 1", Q::N(Z1), 0, None, 1),
    ge("p3 >= n3", Q::P(Z2), 0, Some(Q::N(Z2)), 0),
    ge("n3 >= 1", Q::N(Z2), 0, None, 1),
    ge("q2 - 1 >= m2", Q::Qb(Z1), -1, Some(Q::M(Z1)), 0),
    ge("q3 - 1 >= m3", Q::Qb(Z2), -1, Some(Q::M(Z2)), 0),
];

fn cancel_rule(n: u8) -> Option<CancelRule> {
    Some(match n {
        18 => CancelRule { pairs: &PAIRS_18, index: &INDEX_18 },
        19 => CancelRule { pairs: &PAIRS_19, index: &INDEX_19 },
        20 => CancelRule { pairs: &PAIRS_19, index: &INDEX_20 },
        21 => CancelRule { pairs: &PAIRS_21, index: &INDEX_21 },
        _ => return None,
    })
}

fn apply_cancel<T: Real>(rule: RuleId, r: &CancelRule, spec: &Spec2<T>, slot: Option<usize>) -> Result<Rewrite<T>> {
    if slot.is_some_and(|s| s != 0) {
        return Err(Error::PatternNotMatched { rule: rule.to_string(), detail: "cancellation rules take no slot".into() });
    }
    let mut checked = Vec::new();
    check_index(rule, spec, r.index, &mut checked)?;
    let nomatch = |what: String| Error::PatternNotMatched { rule: rule.to_string(), detail: what };
    let mut out = spec.clone();
    for pair in r.pairs {
        match *pair {
            Pair::Joint { upper, lower } => {
                let (i, j) = (upper.resolve(spec.p1()), lower.resolve(spec.q1()));
                let (Some(i), Some(j)) = (i, j) else { return Err(nomatch("joint lists too short".into())) };
                if spec.upper_joint[i] != spec.lower_joint[j] {
                    return Err(nomatch(format!("upper_joint[{i}] differs from lower_joint[{j}]")));
                }
                checked.push(format!("upper_joint[{i}] = lower_joint[{j}]"));
            }
            Pair::Block { var, upper, lower } => {
                let b = spec.block(var);
                let (i, j) = (upper.resolve(b.p()), lower.resolve(b.q()));
                let (Some(i), Some(j)) = (i, j) else { return Err(nomatch(format!("{var} lists too short"))) };
                if b.upper[i] != b.lower[j] {
                    return Err(nomatch(format!("{var}_block.upper[{i}] differs from {var}_block.lower[{j}]")));
                }
                checked.push(format!("{var}_block.upper[{i}] = {var}_block.lower[{j}]"));
            }
        }
    }
    // remove after all checks; the pairs touch disjoint lists
    for pair in r.pairs {
        match *pair {
            Pair::Joint { upper, lower } => {
                let i = upper.resolve(spec.p1()).unwrap_or(0);
                let j = lower.resolve(spec.q1()).unwrap_or(0);
                Layer::JointUpper { numer: i < spec.n1 }.remove(&mut out, i);
                Layer::JointLower.remove(&mut out, j);
            }
            Pair::Block { var, upper, lower } => {
                let b = spec.block(var);
                let i = upper.resolve(b.p()).unwrap_or(0);
                let j = lower.resolve(b.q()).unwrap_or(0);
                Layer::Upper { var, numer: i < b.n }.remove(&mut out, i);
                Layer::Lower { var, numer: j < b.m }.remove(&mut out, j);
            }
        }
    }
    Ok(identity_rewrite(rule, out, cplx(T::one()), [ArgMap::Identity; 2], checked))
}

/// Single-entry or cancellation rule `7.4` to `7.21`.
pub fn rewrite_rule<T: Real>(spec: &Spec2<T>, rule: RuleId, slot: Option<usize>) -> Result<Rewrite<T>> {
    if let Some(r) = single_rule(rule.0) {
        apply_single(rule, &r, spec, slot)
    } else if let Some(r) = cancel_rule(rule.0) {
        apply_cancel(rule, &r, spec, slot)
    } else {
        Err(Error::Domain(format!("rule {rule} takes parameters; use the dedicated constructor")))
    }
}

/// Any rule by identifier.
pub fn apply_rule<T: Real>(spec: &Spec2<T>, rule: RuleId, args: RuleArgs) -> Result<Rewrite<T>> {
    let ks = |r: RuleId| -> Result<(f64, f64)> {
        match (args.k1, args.k2) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(Error::Domain(format!("rule {r} needs k1 and k2"))),
        }
    };
    match rule.0 {
        1 => rewrite_invert(spec),
        2 => {
            let (a, b) = ks(rule)?;
            rewrite_power_shift(spec, a, b)
        }
        3 => {
            let (a, b) = ks(rule)?;
            rewrite_variable_power(spec, a, b)
        }
        _ => rewrite_rule(spec, rule, args.slot),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointCheck<T> {
    pub z1: Complex<T>,
    pub z2: Complex<T>,
    pub lhs: Option<Complex<T>>,
    pub rhs: Option<Complex<T>>,
    pub lhs_method: Option<Method>,
    pub rhs_method: Option<Method>,
    pub deviation: Option<T>,
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport<T> {
    pub rule: RuleId,
    pub points: Vec<PointCheck<T>>,
    pub max_deviation: T,
    pub tol: T,
    pub pass: bool,
}

/// Evaluates both sides at each point.
///
/// Points where either side cannot be evaluated are reported as skipped;
/// the check passes iff every evaluated point deviates by at most `tol`
/// (relative to the larger side, absolute below unit magnitude).
pub fn verify_rewrite<T: Real>(
    spec: &Spec2<T>,
    rw: &Rewrite<T>,
    points: &[(Complex<T>, Complex<T>)],
    tol: T,
    cfg: &EvalConfig<T>,
) -> Result<VerifyReport<T>> {
    let mut out = Vec::with_capacity(points.len());
    let mut max_dev = T::zero();
    let mut evaluated = 0;
    for &(z1, z2) in points {
        let mut pc = PointCheck { z1, z2, lhs: None, rhs: None, lhs_method: None, rhs_method: None, deviation: None, skipped: None };
        if let Some(why) = rw.off_branch(spec, z1, z2) {
            pc.skipped = Some(why);
            out.push(pc);
            continue;
        }
        let lhs = evaluate(spec, z1, z2, MethodChoice::Auto, cfg);
        let (y1, y2) = rw.map_args(spec, z1, z2);
        let rhs = evaluate(&rw.output, y1, y2, MethodChoice::Auto, cfg);
        match (lhs, rhs) {
            (Ok(l), Ok(r)) => {
                let lv = l.value * rw.external_factor(spec, z1, z2);
                let rv = r.value * rw.prefactor;
                let scale = lv.norm().max(rv.norm()).max(T::one());
                let dev = (lv - rv).norm() / scale;
                max_dev = max_dev.max(dev);
                evaluated += 1;
                pc.lhs = Some(lv);
                pc.rhs = Some(rv);
                pc.lhs_method = Some(l.method);
                pc.rhs_method = Some(r.method);
                pc.deviation = Some(dev);
            }
            (Err(e), _) => pc.skipped = Some(format!("left side: {e}")),
            (_, Err(e)) => pc.skipped = Some(format!("right side: {e}")),
        }
        out.push(pc);
    }
    if evaluated == 0 {
        let reasons = out.iter().filter_map(|p| p.skipped.clone()).collect();
        return Err(Error::NoCommonEvaluablePoint { reasons });
    }
    Ok(VerifyReport { rule: rw.rule, points: out, max_deviation: max_dev, tol, pass: max_dev <= tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convergence::{analyticity_exponents, arg_domain_widths};
    use crate::model::{validate_spec, Mode};

    fn c(x: f64) -> Complex<f64> {
        cplx(x)
    }

    fn sample() -> Spec2<f64> {
        Spec2 {
            n1: 1,
            upper_joint: vec![JointEntry::real(0.5, 1.0, 1.0, 1.0), JointEntry::real(0.25, 0.5, 1.0, 1.0)],
            lower_joint: vec![JointEntry::real(0.375, 1.0, 0.5, 1.0)],
            z1_block: Block::new(1, 1, vec![SingleEntry::real(0.375, 1.0, 1.0)], vec![SingleEntry::real(0.0, 1.0, 1.0), SingleEntry::real(0.125, 1.0, 1.0)]),
            z2_block: Block::new(1, 0, vec![], vec![SingleEntry::real(0.0, 1.0, 1.0), SingleEntry::real(0.25, 1.0, 1.0)]),
            negate: [false; 2],
        }
    }

    #[test]
    fn rule_ids_round_trip() {
        for r in RuleId::ALL {
            assert_eq!(r.to_string().parse::<RuleId>().unwrap(), r);
        }
        assert!("7.22".parse::<RuleId>().is_err());
        assert!("8.1".parse::<RuleId>().is_err());
    }

    #[test]
    fn invert_is_involution() {
        let mut s = sample();
        s.n1 = 0;
        let once = rewrite_invert(&s).unwrap();
        let twice = rewrite_invert(&once.output).unwrap();
        assert_eq!(twice.output, s);
        assert_eq!(once.output.z1_block.m, s.z1_block.n);
        assert!(matches!(rewrite_invert(&sample()), Err(Error::ConstraintViolated { .. })));
    }

    #[test]
    fn variable_power_unit_is_identity() {
        let s = sample();
        let rw = rewrite_variable_power(&s, 1.0, 1.0).unwrap();
        assert_eq!(rw.output, s);
        assert_eq!(rw.prefactor, c(1.0));
        let back = rewrite_variable_power(&rewrite_variable_power(&s, 2.0, 4.0).unwrap().output, 0.5, 0.25).unwrap();
        assert_eq!(back.output, s);
    }

    #[test]
    fn variable_power_scales_exponents() {
        let s = sample();
        let (r, t) = analyticity_exponents(&s);
        let rw = rewrite_variable_power(&s, 2.0, 3.0).unwrap();
        let (r2, t2) = analyticity_exponents(&rw.output);
        assert!((r2 - 2.0 * r).abs() < 1e-15 && (t2 - 3.0 * t).abs() < 1e-15);
    }

    #[test]
    fn k_must_be_positive() {
        assert!(matches!(rewrite_power_shift(&sample(), 0.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(rewrite_variable_power(&sample(), 1.0, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn extract_constant_joint_numerator() {
        let mut s = sample();
        s.upper_joint[0] = JointEntry::real(0.5, 0.0, 0.0, 2.0);
        let rw = rewrite_rule(&s, RuleId(7), Some(0)).unwrap();
        assert!((rw.prefactor - std::f64::consts::PI).norm() < 1e-13);
        assert_eq!(rw.output.n1, 0);
        assert_eq!(rw.output.p1(), 1);
        assert!(validate_spec(&rw.output, Mode::Lax).is_empty());
    }

    #[test]
    fn extract_constraint_named() {
        let mut s = sample();
        s.upper_joint[0] = JointEntry::real(1.5, 0.0, 0.0, 1.0);
        let err = rewrite_rule(&s, RuleId(7), Some(0)).unwrap_err();
        assert_eq!(err, Error::ConstraintViolated { rule: "7.7".into(), constraint: "Re(1-a) <= 0".into() });
    }

    #[test]
    fn extract_constant_m_entry() {
        let mut s = sample();
        s.z1_block.lower[0] = SingleEntry::real(3.0, 0.0, 1.0);
        let rw = rewrite_rule(&s, RuleId(12), Some(0)).unwrap();
        assert!((rw.prefactor - 2.0).norm() < 1e-13);
        assert_eq!((rw.output.z1_block.m, rw.output.z1_block.q()), (0, 1));
    }

    #[test]
    fn pattern_mismatch() {
        let err = rewrite_rule(&sample(), RuleId(7), Some(0)).unwrap_err();
        assert!(matches!(err, Error::PatternNotMatched { .. }));
        assert!(matches!(rewrite_rule(&sample(), RuleId(19), None), Err(Error::ConstraintViolated { .. } | Error::PatternNotMatched { .. })));
    }

    #[test]
    fn move_joint_entry_into_block() {
        let mut s = sample();
        s.upper_joint[0].big_a = 0.0;
        let rw = rewrite_rule(&s, RuleId(4), None).unwrap();
        assert_eq!(rw.output.z1_block.upper[0], SingleEntry::real(0.5, 1.0, 1.0));
        assert_eq!((rw.output.n1, rw.output.z1_block.n), (0, 2));
    }

    #[test]
    fn cancellation_keeps_widths() {
        let mut s = sample();
        let dup = s.upper_joint[0];
        s.lower_joint.push(dup);
        let e = s.z1_block.upper[0];
        s.z1_block.lower.push(e);
        s.z2_block.upper.insert(0, SingleEntry::real(0.3, 1.0, 1.0));
        s.z2_block.n = 1;
        s.z2_block.lower.push(SingleEntry::real(0.3, 1.0, 1.0));
        let rw = rewrite_rule(&s, RuleId(18), None).unwrap();
        assert_eq!(arg_domain_widths(&rw.output), arg_domain_widths(&s));
        assert_eq!(rw.output.p1(), 1);
        assert_eq!(rw.output.q1(), 1);
    }

    #[test]
    fn identity_verifies_exactly() {
        let s = sample();
        let rw = rewrite_variable_power(&s, 1.0, 1.0).unwrap();
        let rep = verify_rewrite(&s, &rw, &[(c(0.2), c(0.3))], 1e-12, &EvalConfig::default()).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.max_deviation, 0.0);
    }

    #[test]
    fn power_shift_self_consistent() {
        let s = sample();
        let rw = rewrite_power_shift(&s, 2.0, 3.0).unwrap();
        let rep = verify_rewrite(&s, &rw, &[(c(0.5), c(0.5)), (c(0.3), c(0.2))], 1e-9, &EvalConfig::default()).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn power_map_branch() {
        let rw = apply_rule(&sample(), RuleId(3), RuleArgs { k1: Some(2.0), k2: Some(1.0), ..Default::default() }).unwrap();
        assert!(rw.off_branch(&sample(), Complex::new(0.3, 0.1), c(0.2)).is_none());
        let why = rw.off_branch(&sample(), Complex::new(-0.3, 0.1), c(0.2)).unwrap();
        assert!(why.starts_with("z1"), "{why}");
        // the unit power is the identity on every branch
        assert!(rw.off_branch(&sample(), c(0.3), c(-0.2)).is_none());
    }
}
