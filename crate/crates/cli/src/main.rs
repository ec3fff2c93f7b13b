//! `ifunc` command-line front end. Every path prints one JSON document.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use ifunc::convergence::classify;
use ifunc::format::{parse_spec, parse_spec1, serialize_spec, spec1_to_value, spec_to_value};
use ifunc::identities::{apply_rule, verify_rewrite, Rewrite, RuleArgs, RuleId};
use ifunc::reductions::{self, reference, SdParams};
use ifunc::series::series_applicability;
use ifunc::{evaluate, validate_spec, EvalConfig, Error, IFunctionSpec2, MethodChoice, Mode};

mod complex;

use complex::parse_complex;

const EXIT_EVAL: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "ifunc", version, about = "Bivariate I-function evaluator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Structural checks and convergence report.
    Validate {
        spec: PathBuf,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z1: Option<Complex64>,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z2: Option<Complex64>,
        #[arg(long, default_value = "strict", value_parser = parse_mode)]
        mode: Mode,
        #[command(flatten)]
        cfg: CfgArgs,
    },
    /// Evaluate at one point.
    Eval {
        spec: PathBuf,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z1: Complex64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z2: Complex64,
        #[arg(long, default_value = "auto")]
        method: MethodChoice,
        #[command(flatten)]
        cfg: CfgArgs,
    },
    /// Apply a transformation rule, optionally checking it numerically.
    Rewrite {
        spec: PathBuf,
        #[arg(long)]
        rule: RuleId,
        #[arg(long)]
        slot: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        k1: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        k2: Option<f64>,
        #[arg(long)]
        check: bool,
        /// Check point `z1,z2`; repeatable. Defaults to three fixed points.
        #[arg(long = "at", value_parser = parse_point, allow_hyphen_values = true)]
        at: Vec<(Complex64, Complex64)>,
        /// Relative tolerance of the check.
        #[arg(long, default_value_t = 1e-8)]
        check_tol: f64,
        #[command(flatten)]
        cfg: CfgArgs,
    },
    /// Recognize classical special cases.
    Reduce { spec: PathBuf },
    /// Build a spec for a classical function; the document goes to stdout.
    Make {
        /// lerch, polylog, wright-psi, wright-bessel, kdf, srivastava-daoust or product.
        kind: String,
        /// Parameters as a JSON object.
        #[arg(long, default_value = "{}")]
        params: String,
        /// Wrap the spec together with its prefactor and notes.
        #[arg(long)]
        meta: bool,
    },
    /// Pointwise deviation between two specs at random points.
    Compare {
        spec_a: PathBuf,
        spec_b: PathBuf,
        #[arg(long, default_value_t = 5)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Radius of the polydisc the points are drawn from.
        #[arg(long, default_value_t = 0.5)]
        radius: f64,
        #[arg(long, default_value = "auto")]
        method: MethodChoice,
        #[command(flatten)]
        cfg: CfgArgs,
    },
}

#[derive(Args, Clone)]
struct CfgArgs {
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_ring: Option<usize>,
    #[arg(long)]
    quiet_rings: Option<usize>,
    #[arg(long)]
    contour_halfwidth: Option<f64>,
    #[arg(long)]
    contour_panels: Option<usize>,
    #[arg(long)]
    pole_tol: Option<f64>,
    #[arg(long)]
    boundary_radius_tol: Option<f64>,
    #[arg(long)]
    force_contour: bool,
}

impl CfgArgs {
    fn build(&self) -> Result<EvalConfig, Failure> {
        let mut c = EvalConfig::default();
        if let Some(t) = self.tol {
            c.tol_rel = t;
        }
        if let Some(r) = self.max_ring {
            c.max_ring = r;
        }
        if let Some(q) = self.quiet_rings {
            c.quiet_rings = q;
        }
        c.contour_halfwidth = self.contour_halfwidth;
        c.contour_panels = self.contour_panels;
        if let Some(p) = self.pole_tol {
            c.pole_tol = p;
        }
        if let Some(b) = self.boundary_radius_tol {
            c.boundary_radius_tol = b;
        }
        c.force_contour = self.force_contour;
        c.check().map_err(|e| Failure::new(EXIT_USAGE, "usage", e.to_string()))?;
        Ok(c)
    }
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "strict" => Ok(Mode::Strict),
        "lax" => Ok(Mode::Lax),
        _ => Err(format!("unknown mode '{s}' (expected strict or lax)")),
    }
}

fn parse_point(s: &str) -> Result<(Complex64, Complex64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected z1,z2 in '{s}'"))?;
    Ok((parse_complex(a)?, parse_complex(b)?))
}

struct Failure {
    code: u8,
    body: Value,
}

impl Failure {
    fn new(code: u8, kind: &str, message: String) -> Self {
        Self { code, body: json!({ "error": { "kind": kind, "message": message } }) }
    }

    fn from_error(code: u8, e: &Error) -> Self {
        Self::new(code, e.kind(), e.to_string())
    }

    fn eval(e: Error) -> Self {
        Self::from_error(EXIT_EVAL, &e)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::new(EXIT_USAGE, "io", format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<IFunctionSpec2, Failure> {
    parse_spec(&read(path)?).map_err(|e| Failure::from_error(EXIT_INVALID, &e))
}

/// Loads and rejects specs with strict-mode violations.
fn load_valid(path: &Path) -> Result<IFunctionSpec2, Failure> {
    let spec = load(path)?;
    let v = validate_spec(&spec, Mode::Strict);
    if !v.is_empty() {
        return Err(Failure {
            code: EXIT_INVALID,
            body: json!({ "error": { "kind": "validation", "message": "spec has structural violations", "violations": v } }),
        });
    }
    Ok(spec)
}

fn c2(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn rewrite_value(rw: &Rewrite<f64>) -> Value {
    json!({
        "rule": rw.rule,
        "prefactor": c2(rw.prefactor),
        "arg_map": rw.arg_map,
        "output": spec_to_value(&rw.output),
        "constraints_checked": rw.constraints_checked,
    })
}

fn default_points() -> Vec<(Complex64, Complex64)> {
    vec![
        (Complex64::new(0.3, 0.1), Complex64::new(0.2, -0.1)),
        (Complex64::new(-0.2, 0.15), Complex64::new(0.25, 0.0)),
        (Complex64::new(0.15, -0.05), Complex64::new(-0.1, 0.2)),
    ]
}

fn params<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::new(EXIT_USAGE, "params", e.to_string()))
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct LerchParams {
    p: f64,
    #[serde(default = "one")]
    alpha: f64,
    q: f64,
    #[serde(default = "one")]
    beta: f64,
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct PolylogParams {
    p: f64,
    q: f64,
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct PsiParams {
    #[serde(default)]
    num1: Vec<(f64, f64)>,
    #[serde(default)]
    den1: Vec<(f64, f64)>,
    #[serde(default)]
    num2: Vec<(f64, f64)>,
    #[serde(default)]
    den2: Vec<(f64, f64)>,
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct BesselParams {
    mu: f64,
    #[serde(default = "one")]
    alpha: f64,
    nu: f64,
    #[serde(default = "one")]
    beta: f64,
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct ProductParams {
    s1: Value,
    s2: Value,
}

fn one() -> f64 {
    1.0
}

fn make(kind: &str, text: &str) -> Result<(IFunctionSpec2, Value), Failure> {
    let bad = |e: Error| Failure::from_error(EXIT_USAGE, &e);
    Ok(match kind {
        "lerch" => {
            let p: LerchParams = params(text)?;
            (reductions::make_lerch_product(p.p, p.alpha, p.q, p.beta).map_err(bad)?, json!({}))
        }
        "polylog" => {
            let p: PolylogParams = params(text)?;
            let (note, s) = reductions::make_polylog_product(p.p, p.q).map_err(bad)?;
            (s, json!({ "note": note }))
        }
        "wright-psi" => {
            let p: PsiParams = params(text)?;
            (reductions::make_wright_psi_product(&p.num1, &p.den1, &p.num2, &p.den2).map_err(bad)?, json!({}))
        }
        "wright-bessel" => {
            let p: BesselParams = params(text)?;
            (reductions::make_wright_bessel_product(p.mu, p.alpha, p.nu, p.beta).map_err(bad)?, json!({}))
        }
        "kdf" => {
            let p: reference::KdfLists = params(text)?;
            let (pre, s) = reductions::make_kampe_de_feriet(&p).map_err(bad)?;
            (s, json!({ "prefactor": c2(pre), "note": "value = prefactor * F(z1, z2)" }))
        }
        "srivastava-daoust" => {
            let p: SdParams = params(text)?;
            let (pre, s) = reductions::make_srivastava_daoust(&p).map_err(bad)?;
            (s, json!({ "prefactor": c2(pre), "note": "value = prefactor * Pochhammer-normalized series" }))
        }
        "product" => {
            let p: ProductParams = params(text)?;
            let one_var = |v: &Value| parse_spec1::<f64>(&v.to_string()).map_err(|e| Failure::from_error(EXIT_INVALID, &e));
            (reductions::make_product_spec(&one_var(&p.s1)?, &one_var(&p.s2)?), json!({}))
        }
        other => return Err(Failure::new(EXIT_USAGE, "usage", format!("unknown kind '{other}'"))),
    })
}

fn run(cmd: Cmd) -> Result<Value, Failure> {
    match cmd {
        Cmd::Validate { spec, z1, z2, mode, cfg } => {
            let cfg = cfg.build()?;
            let s = load(&spec)?;
            let violations = validate_spec(&s, mode);
            let z1 = z1.unwrap_or(Complex64::new(0.5, 0.0));
            let z2 = z2.unwrap_or(Complex64::new(0.5, 0.0));
            let report = classify(&s, z1, z2, &cfg);
            let diag = series_applicability(&s, &cfg);
            let body = json!({
                "valid": violations.is_empty(),
                "violations": violations,
                "convergence": match &report { Ok(r) => json!(r), Err(e) => json!({ "error": { "kind": e.kind(), "message": e.to_string() } }) },
                "series": diag,
            });
            if !violations.is_empty() {
                return Err(Failure { code: EXIT_INVALID, body });
            }
            Ok(body)
        }
        Cmd::Eval { spec, z1, z2, method, cfg } => {
            let cfg = cfg.build()?;
            let s = load_valid(&spec)?;
            let r = evaluate(&s, z1, z2, method, &cfg).map_err(Failure::eval)?;
            Ok(json!(r))
        }
        Cmd::Rewrite { spec, rule, slot, k1, k2, check, at, check_tol, cfg } => {
            let cfg = cfg.build()?;
            let s = load_valid(&spec)?;
            let rw = apply_rule(&s, rule, RuleArgs { slot, k1, k2 }).map_err(Failure::eval)?;
            let mut body = json!({ "rewrite": rewrite_value(&rw) });
            if check {
                let pts = if at.is_empty() { default_points() } else { at };
                let rep = verify_rewrite(&s, &rw, &pts, check_tol, &cfg).map_err(Failure::eval)?;
                let pass = rep.pass;
                body["verify"] = json!(rep);
                if !pass {
                    return Err(Failure { code: EXIT_EVAL, body });
                }
            }
            Ok(body)
        }
        Cmd::Reduce { spec } => {
            let s = load(&spec)?;
            let mut body = json!({
                "tags": reductions::classify_special(&s),
                "notes": reductions::structure_notes(&s),
            });
            if let Ok((a, b)) = reductions::factorize(&s) {
                body["factors"] = json!([spec1_to_value(&a), spec1_to_value(&b)]);
            }
            body["confluence"] = match reductions::confluence_reduce(&s) {
                Ok((pre, s1)) => json!({ "prefactor": c2(pre), "spec1": spec1_to_value(&s1) }),
                Err(e) => json!({ "error": { "kind": e.kind(), "message": e.to_string() } }),
            };
            Ok(body)
        }
        Cmd::Make { kind, params, meta } => {
            let (s, extra) = make(&kind, &params)?;
            if meta {
                let mut v = extra;
                v["kind"] = json!(kind);
                v["spec"] = spec_to_value(&s);
                Ok(v)
            } else {
                // the bare document, loadable by the other subcommands
                serde_json::from_str(&serialize_spec(&s)).map_err(|e| Failure::new(EXIT_EVAL, "internal", e.to_string()))
            }
        }
        Cmd::Compare { spec_a, spec_b, points, seed, radius, method, cfg } => {
            let cfg = cfg.build()?;
            if !(radius > 0.0 && radius < 1.0) {
                return Err(Failure::new(EXIT_USAGE, "usage", "radius must lie in (0, 1)".into()));
            }
            let a = load_valid(&spec_a)?;
            let b = load_valid(&spec_b)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut draw = || {
                let r = radius * rng.gen::<f64>().sqrt();
                Complex64::from_polar(r, std::f64::consts::TAU * rng.gen::<f64>())
            };
            let mut rows = Vec::with_capacity(points);
            let mut max_dev: Option<f64> = None;
            for _ in 0..points {
                let (z1, z2) = (draw(), draw());
                let va = evaluate(&a, z1, z2, method, &cfg);
                let vb = evaluate(&b, z1, z2, method, &cfg);
                let side = |r: &ifunc::Result<ifunc::EvalResult<f64>>| match r {
                    Ok(v) => json!({ "value": c2(v.value), "method": v.method, "abs_err_est": v.abs_err_est }),
                    Err(e) => json!({ "error": { "kind": e.kind(), "message": e.to_string() } }),
                };
                let dev = match (&va, &vb) {
                    (Ok(x), Ok(y)) => {
                        let d = (x.value - y.value).norm() / x.value.norm().max(y.value.norm()).max(1.0);
                        max_dev = Some(max_dev.map_or(d, |m: f64| m.max(d)));
                        Some(d)
                    }
                    _ => None,
                };
                rows.push(json!({ "z1": c2(z1), "z2": c2(z2), "a": side(&va), "b": side(&vb), "deviation": dev }));
            }
            Ok(json!({ "seed": seed, "points": rows, "max_deviation": max_dev }))
        }
    }
}

fn emit(v: &Value) {
    use std::io::Write;
    // a closed pipe downstream is not our failure
    let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(v).expect("JSON value serializes"));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            emit(&json!({ "error": { "kind": "usage", "message": e.render().to_string() } }));
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(cli.cmd) {
        Ok(v) => {
            emit(&v);
            ExitCode::SUCCESS
        }
        Err(f) => {
            emit(&f.body);
            ExitCode::from(f.code)
        }
    }
}
