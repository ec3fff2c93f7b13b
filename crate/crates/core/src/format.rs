//! JSON file format (`ifunc2-v1`, `ifunc1-v1`).
//!
//! Complex numbers are `[re, im]` pairs. Each block uses the letters of its
//! position (`c, C, U` / `d, D, V` for `z1`, `e, E, P` / `f, F, Q` for `z2`).
//! The optional `negate` field (`[bool, bool]`, or `bool` for one-variable
//! files) marks evaluation at negated arguments and is omitted when false.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Block, JointEntry, SingleEntry, Spec1, Spec2};
use crate::scalar::Real;

pub const FORMAT2: &str = "ifunc2-v1";
pub const FORMAT1: &str = "ifunc1-v1";

type Pair = [f64; 2];

fn pair<T: Real>(z: Complex<T>) -> Pair {
    [z.re.to_f64_lossy(), z.im.to_f64_lossy()]
}

fn unpair<T: Real>(p: Pair) -> Complex<T> {
    Complex::new(T::lit(p[0]), T::lit(p[1]))
}

fn f<T: Real>(x: T) -> f64 {
    x.to_f64_lossy()
}

fn is_false(b: &bool) -> bool {
    !*b
}

fn no_negation(b: &[bool; 2]) -> bool {
    !b[0] && !b[1]
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UpperJointW {
    a: Pair,
    alpha: f64,
    #[serde(rename = "A")]
    big_a: f64,
    xi: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LowerJointW {
    b: Pair,
    beta: f64,
    #[serde(rename = "B")]
    big_b: f64,
    eta: f64,
}

macro_rules! single_wire {
    ($name:ident, $c:literal, $coef:literal, $exp:literal) => {
        #[derive(Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        struct $name {
            #[serde(rename = $c)]
            c: Pair,
            #[serde(rename = $coef)]
            coeff: f64,
            #[serde(rename = $exp)]
            exp: f64,
        }

        impl $name {
            fn from_entry<T: Real>(e: &SingleEntry<T>) -> Self {
                Self { c: pair(e.c), coeff: f(e.coeff), exp: f(e.exp) }
            }

            fn to_entry<T: Real>(&self) -> SingleEntry<T> {
                SingleEntry::new(unpair(self.c), T::lit(self.coeff), T::lit(self.exp))
            }
        }
    };
}

single_wire!(CW, "c", "C", "U");
single_wire!(DW, "d", "D", "V");
single_wire!(EW, "e", "E", "P");
single_wire!(FW, "f", "F", "Q");

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockW<U, L> {
    m: usize,
    n: usize,
    upper: Vec<U>,
    lower: Vec<L>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Spec2W {
    format: String,
    n1: usize,
    upper_joint: Vec<UpperJointW>,
    lower_joint: Vec<LowerJointW>,
    z1_block: BlockW<CW, DW>,
    z2_block: BlockW<EW, FW>,
    #[serde(default, skip_serializing_if = "no_negation")]
    negate: [bool; 2],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Spec1W {
    format: String,
    m: usize,
    n: usize,
    upper: Vec<CW>,
    lower: Vec<DW>,
    #[serde(default, skip_serializing_if = "is_false")]
    negate: bool,
}

macro_rules! block_conv {
    ($to:ident, $from:ident, $u:ident, $l:ident) => {
        fn $to<T: Real>(b: &Block<T>) -> BlockW<$u, $l> {
            BlockW {
                m: b.m,
                n: b.n,
                upper: b.upper.iter().map($u::from_entry).collect(),
                lower: b.lower.iter().map($l::from_entry).collect(),
            }
        }

        fn $from<T: Real>(b: &BlockW<$u, $l>) -> Block<T> {
            Block::new(
                b.m,
                b.n,
                b.upper.iter().map(|e| e.to_entry()).collect(),
                b.lower.iter().map(|e| e.to_entry()).collect(),
            )
        }
    };
}

block_conv!(block1_w, block1_from, CW, DW);
block_conv!(block2_w, block2_from, EW, FW);

fn decode<'de, W: Deserialize<'de>>(text: &'de str) -> Result<W> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let message = inner.to_string();
        match inner.classify() {
            serde_json::error::Category::Data => Error::Schema { path, message },
            _ => Error::Syntax { path, message },
        }
    })
}

fn check_tag(found: &str, want: &str) -> Result<()> {
    if found == want {
        Ok(())
    } else {
        Err(Error::Schema {
            path: "format".into(),
            message: format!("expected format tag \"{want}\", found \"{found}\""),
        })
    }
}

/// Parses an `ifunc2-v1` document.
pub fn parse_spec<T: Real>(text: &str) -> Result<Spec2<T>> {
    let w: Spec2W = decode(text)?;
    check_tag(&w.format, FORMAT2)?;
    let joint = |a: Pair, x: f64, y: f64, e: f64| JointEntry::new(unpair(a), T::lit(x), T::lit(y), T::lit(e));
    Ok(Spec2 {
        n1: w.n1,
        upper_joint: w.upper_joint.iter().map(|e| joint(e.a, e.alpha, e.big_a, e.xi)).collect(),
        lower_joint: w.lower_joint.iter().map(|e| joint(e.b, e.beta, e.big_b, e.eta)).collect(),
        z1_block: block1_from(&w.z1_block),
        z2_block: block2_from(&w.z2_block),
        negate: w.negate,
    })
}

fn spec2_wire<T: Real>(spec: &Spec2<T>) -> Spec2W {
    Spec2W {
        format: FORMAT2.into(),
        n1: spec.n1,
        upper_joint: spec
            .upper_joint
            .iter()
            .map(|e| UpperJointW { a: pair(e.a), alpha: f(e.alpha), big_a: f(e.big_a), xi: f(e.xi) })
            .collect(),
        lower_joint: spec
            .lower_joint
            .iter()
            .map(|e| LowerJointW { b: pair(e.a), beta: f(e.alpha), big_b: f(e.big_a), eta: f(e.xi) })
            .collect(),
        z1_block: block1_w(&spec.z1_block),
        z2_block: block2_w(&spec.z2_block),
        negate: spec.negate,
    }
}

/// Canonical pretty-printed `ifunc2-v1` text.
pub fn serialize_spec<T: Real>(spec: &Spec2<T>) -> String {
    serde_json::to_string_pretty(&spec2_wire(spec)).expect("spec serializes")
}

/// The spec as a JSON value (for embedding in reports).
pub fn spec_to_value<T: Real>(spec: &Spec2<T>) -> serde_json::Value {
    serde_json::to_value(spec2_wire(spec)).expect("spec serializes")
}

fn spec1_wire<T: Real>(spec: &Spec1<T>) -> Spec1W {
    let b = block1_w(&spec.block);
    Spec1W { format: FORMAT1.into(), m: b.m, n: b.n, upper: b.upper, lower: b.lower, negate: spec.negate }
}

/// Parses an `ifunc1-v1` document.
pub fn parse_spec1<T: Real>(text: &str) -> Result<Spec1<T>> {
    let w: Spec1W = decode(text)?;
    check_tag(&w.format, FORMAT1)?;
    let b = BlockW { m: w.m, n: w.n, upper: w.upper, lower: w.lower };
    Ok(Spec1 { block: block1_from(&b), negate: w.negate })
}

pub fn serialize_spec1<T: Real>(spec: &Spec1<T>) -> String {
    serde_json::to_string_pretty(&spec1_wire(spec)).expect("spec serializes")
}

pub fn spec1_to_value<T: Real>(spec: &Spec1<T>) -> serde_json::Value {
    serde_json::to_value(spec1_wire(spec)).expect("spec serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"format":"ifunc2-v1","n1":0,"upper_joint":[],"lower_joint":[],
        "z1_block":{"m":1,"n":0,"upper":[],"lower":[{"d":[0,0],"D":1,"V":1}]},
        "z2_block":{"m":1,"n":0,"upper":[],"lower":[{"f":[0,0],"F":1,"Q":1}]}}"#;

    #[test]
    fn minimal_document() {
        let s: Spec2<f64> = parse_spec(MINIMAL).unwrap();
        assert!(s.upper_joint.is_empty() && s.lower_joint.is_empty());
        assert_eq!(s.z1_block.m, 1);
        assert_eq!(s.negate, [false, false]);
    }

    #[test]
    fn missing_field_names_path() {
        let text = MINIMAL.replace(r#","D":1"#, "");
        match parse_spec::<f64>(&text) {
            Err(Error::Schema { path, message }) => {
                assert_eq!(path, "z1_block.lower[0]");
                assert!(message.contains("`D`"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_error() {
        let text = &MINIMAL[..40];
        assert!(matches!(parse_spec::<f64>(text), Err(Error::Syntax { .. })));
    }

    #[test]
    fn wrong_tag() {
        let text = MINIMAL.replace("ifunc2-v1", "ifunc9");
        assert!(matches!(parse_spec::<f64>(&text), Err(Error::Schema { path, .. }) if path == "format"));
    }

    #[test]
    fn negate_round_trip_and_omission() {
        let mut s: Spec2<f64> = parse_spec(MINIMAL).unwrap();
        assert!(!serialize_spec(&s).contains("negate"));
        s.negate = [true, false];
        let text = serialize_spec(&s);
        assert!(text.contains("negate"));
        assert_eq!(parse_spec::<f64>(&text).unwrap(), s);
    }

    #[test]
    fn spec1_round_trip() {
        let s = Spec1::negated(Block::new(
            1,
            1,
            vec![SingleEntry::real(0.25, 1.5, 2.0)],
            vec![SingleEntry::new(Complex::new(0.0, 0.1), 1.0, 1.0)],
        ));
        let text = serialize_spec1(&s);
        assert_eq!(parse_spec1::<f64>(&text).unwrap(), s);
    }
}
