//! Evaluation results and method dispatch.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{EvalConfig, Spec1, Spec2};
use crate::scalar::Real;
use crate::{contour, series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Series,
    Contour,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalResult<T> {
    pub value: Complex<T>,
    pub abs_err_est: T,
    pub terms_used: usize,
    pub rings_used: usize,
    pub method: Method,
    pub warnings: Vec<String>,
}

/// Method requested by the caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    #[default]
    Auto,
    Series,
    Contour,
}

impl std::str::FromStr for MethodChoice {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "auto" => Ok(Self::Auto),
            "series" => Ok(Self::Series),
            "contour" => Ok(Self::Contour),
            other => Err(format!("unknown method '{other}' (expected auto, series or contour)")),
        }
    }
}

/// Series failures that make the contour worth trying.
fn falls_back(e: &Error) -> bool {
    matches!(
        e,
        Error::NotApplicable { .. } | Error::NoConvergence { .. } | Error::DegeneratePole { .. } | Error::AccuracyNotReached { .. }
    )
}

/// Evaluates `spec` at `(z1, z2)`.
///
/// `Auto` takes the residue series when it applies and converges, and
/// the contour integral otherwise. When both fail the contour error is
/// returned, since it is the more specific one.
pub fn evaluate<T: Real>(
    spec: &Spec2<T>,
    z1: Complex<T>,
    z2: Complex<T>,
    method: MethodChoice,
    cfg: &EvalConfig<T>,
) -> Result<EvalResult<T>> {
    match method {
        MethodChoice::Series => series::eval_series(spec, z1, z2, cfg),
        MethodChoice::Contour => contour::eval_contour(spec, z1, z2, cfg),
        MethodChoice::Auto => match series::eval_series(spec, z1, z2, cfg) {
            Err(e) if falls_back(&e) => {
                let mut r = contour::eval_contour(spec, z1, z2, cfg)?;
                r.warnings.insert(0, format!("series skipped: {e}"));
                Ok(r)
            }
            other => other,
        },
    }
}

/// One-variable analogue of [`evaluate`].
pub fn evaluate_1var<T: Real>(spec: &Spec1<T>, z: Complex<T>, method: MethodChoice, cfg: &EvalConfig<T>) -> Result<EvalResult<T>> {
    match method {
        MethodChoice::Series => series::eval_series_1var(spec, z, cfg),
        MethodChoice::Contour => contour::eval_contour_1var(spec, z, cfg),
        MethodChoice::Auto => match series::eval_series_1var(spec, z, cfg) {
            Err(e) if falls_back(&e) => {
                let mut r = contour::eval_contour_1var(spec, z, cfg)?;
                r.warnings.insert(0, format!("series skipped: {e}"));
                Ok(r)
            }
            other => other,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Block, SingleEntry};
    use crate::scalar::cplx;

    fn lerch() -> Spec1<f64> {
        Spec1::negated(Block::new(
            1,
            2,
            vec![SingleEntry::real(0.0, 1.0, 1.0), SingleEntry::real(0.0, 1.0, 2.0)],
            vec![SingleEntry::real(0.0, 1.0, 1.0), SingleEntry::real(-1.0, 1.0, 2.0)],
        ))
    }

    #[test]
    fn auto_prefers_series() {
        let r = evaluate_1var(&lerch(), cplx(0.5), MethodChoice::Auto, &EvalConfig::default()).unwrap();
        assert_eq!(r.method, Method::Series);
    }

    #[test]
    fn auto_falls_back_outside_disc() {
        // analytic continuation beyond |z| = 1 on the line z = -x
        let cfg = EvalConfig::default().with_tol(1e-8);
        let r = evaluate_1var(&lerch(), Complex::new(2.0, 0.5), MethodChoice::Auto, &cfg).unwrap();
        assert_eq!(r.method, Method::Contour);
        assert!(r.warnings[0].starts_with("series skipped"));
        let want = Complex::new(1.090_752_108_191_225_7, 0.854_237_910_997_337_8);
        assert!((r.value - want).norm() < 1e-7, "{}", r.value);
    }

    #[test]
    fn method_parse() {
        assert_eq!("contour".parse::<MethodChoice>().unwrap(), MethodChoice::Contour);
        assert!("newton".parse::<MethodChoice>().is_err());
    }
}
