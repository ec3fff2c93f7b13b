//! Bivariate I-function: a double Mellin-Barnes integral over ratios of
//! powered gamma functions. Validation, convergence analysis, residue series,
//! contour quadrature, transformation rules and classical special cases.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`).

pub mod contour;
pub mod convergence;
pub mod error;
pub mod eval;
pub mod format;
pub mod gamma;
pub mod identities;
pub mod kernel;
pub mod model;
pub mod quadrature;
pub mod reductions;
pub mod scalar;
pub mod series;
pub mod strip;

pub use error::{Error, Result};

pub use eval::{evaluate, evaluate_1var, EvalResult, Method, MethodChoice};
pub use model::{validate_spec, validate_spec1, Block, JointEntry, Mode, SingleEntry, Var, Violation};
pub use scalar::Real;

/// Double-precision aliases.
pub type IFunctionSpec2 = model::Spec2<f64>;
pub type IFunctionSpec1 = model::Spec1<f64>;
pub type EvalConfig = model::EvalConfig<f64>;
pub type Complex64 = num_complex::Complex64;
