use thiserror::Error;

use crate::model::{EntryRef, Var};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("log-gamma pole at z = {re}{im:+}i")]
    Pole { re: f64, im: f64 },

    #[error("gamma factor of {entry} is singular at the kernel point")]
    KernelPole { entry: EntryRef },

    #[error("degenerate pole: retained factor {entry} is singular at the residue point")]
    DegeneratePole { entry: EntryRef },

    #[error("index {index} out of range for {what} (size {len})")]
    IndexOutOfRange { what: String, index: usize, len: usize },

    #[error("series evaluation not applicable: {}", reasons.join("; "))]
    NotApplicable { reasons: Vec<String> },

    #[error("argument {var} must be non-zero")]
    ZeroArgument { var: Var },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("series did not converge within {rings} rings (last ring magnitude {last_ring:e})")]
    NoConvergence { rings: usize, last_ring: f64 },

    #[error("empty contour strip for {var}: lower bound {lo} is not below upper bound {hi}")]
    EmptyStrip { var: Var, lo: f64, hi: f64 },

    #[error("integrand along {var} does not decay (width {delta}); supply a truncation override")]
    NonDecaying { var: Var, delta: f64 },

    #[error("accuracy not reached: estimate {estimate:e} exceeds {target:e}")]
    AccuracyNotReached { estimate: f64, target: f64 },

    #[error("contour quadrature would need {nodes} nodes along {var}, above the budget of {budget}")]
    QuadratureBudget { var: Var, nodes: usize, budget: usize },

    #[error("convergence of the integral is not established at this point")]
    NotEstablished,

    #[error("rule {rule}: pattern not matched ({detail})")]
    PatternNotMatched { rule: String, detail: String },

    #[error("rule {rule}: constraint violated: {constraint}")]
    ConstraintViolated { rule: String, constraint: String },

    #[error("specification is not separable (joint blocks present)")]
    NotSeparable,

    #[error("the m-block of {var} is empty")]
    EmptyMBlock { var: Var },

    #[error("syntax error at {path}: {message}")]
    Syntax { path: String, message: String },

    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("no point is evaluable on both sides of the rewrite ({})", reasons.join("; "))]
    NoCommonEvaluablePoint { reasons: Vec<String> },
}

impl Error {
    /// Short machine-readable tag for reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Pole { .. } => "pole",
            Error::KernelPole { .. } => "kernel-pole",
            Error::DegeneratePole { .. } => "degenerate-pole",
            Error::IndexOutOfRange { .. } => "index-out-of-range",
            Error::NotApplicable { .. } => "not-applicable",
            Error::ZeroArgument { .. } => "zero-argument",
            Error::Domain(_) => "domain",
            Error::NoConvergence { .. } => "no-convergence",
            Error::EmptyStrip { .. } => "empty-strip",
            Error::NonDecaying { .. } => "non-decaying",
            Error::AccuracyNotReached { .. } => "accuracy-not-reached",
            Error::QuadratureBudget { .. } => "quadrature-budget",
            Error::NotEstablished => "not-established",
            Error::PatternNotMatched { .. } => "pattern-not-matched",
            Error::ConstraintViolated { .. } => "constraint-violated",
            Error::NotSeparable => "not-separable",
            Error::EmptyMBlock { .. } => "empty-m-block",
            Error::Syntax { .. } => "syntax",
            Error::Schema { .. } => "schema",
            Error::NoCommonEvaluablePoint { .. } => "no-common-evaluable-point",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
