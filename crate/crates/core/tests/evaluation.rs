use ifunc::contour::{eval_contour, eval_contour_at};
use ifunc::model::{Spec1, Spec2};
use ifunc::reductions::reference::{double_series, lerch, wright_bessel, DoubleSeries};
use ifunc::reductions::{make_lerch_product, make_srivastava_daoust, make_wright_bessel_product};
use ifunc::series::eval_series;
use ifunc::{evaluate, evaluate_1var, Block, Complex64 as C, Error, EvalConfig, JointEntry, Method, MethodChoice, SingleEntry};

fn joint_spec() -> Spec2<f64> {
    let two = Block::new(2, 0, vec![], vec![SingleEntry::real(0.0, 1.0, 1.0), SingleEntry::real(0.5, 1.0, 1.0)]);
    Spec2 { n1: 1, upper_joint: vec![JointEntry::real(0.0, 1.0, 1.0, 1.0)], z1_block: two.clone(), z2_block: two, ..Default::default() }
}

#[test]
fn contour_does_not_depend_on_the_line() {
    let spec = joint_spec();
    let cfg = EvalConfig::default().with_tol(1e-9);
    let (z1, z2) = (C::new(0.3, 0.1), C::new(0.2, -0.05));
    let a = eval_contour_at(&spec, z1, z2, [-0.3, -0.3], &cfg).unwrap();
    let b = eval_contour_at(&spec, z1, z2, [-0.15, -0.6], &cfg).unwrap();
    assert!((a.value - b.value).norm() < 1e-8 * a.value.norm(), "{} vs {}", a.value, b.value);
    // a line past a pole picks up residues and is refused
    assert!(eval_contour_at(&spec, z1, z2, [0.2, -0.3], &cfg).is_err());
}

#[test]
fn joint_series_and_contour_agree() {
    let spec = joint_spec();
    let cfg = EvalConfig::default().with_tol(1e-10);
    let (z1, z2) = (C::new(-0.2, 0.3), C::new(0.25, 0.1));
    let s = eval_series(&spec, z1, z2, &cfg).unwrap();
    let c = eval_contour(&spec, z1, z2, &cfg.with_tol(1e-8)).unwrap();
    assert!((s.value - c.value).norm() < 1e-7 * s.value.norm(), "{} vs {}", s.value, c.value);
}

#[test]
fn single_precision() {
    let spec = make_lerch_product(2.0, 1.0, 2.0, 0.5).unwrap();
    let z = C::new(0.4, 0.1);
    let want = lerch(2.0, 1.0, z).unwrap() * lerch(2.0, 0.5, z).unwrap();
    let s32: Spec2<f32> = spec.cast();
    let z32 = num_complex::Complex32::new(0.4, 0.1);
    let cfg = ifunc::model::EvalConfig::<f32>::default().with_tol(1e-5);
    let r = evaluate(&s32, z32, z32, MethodChoice::Series, &cfg).unwrap();
    let got = C::new(r.value.re as f64, r.value.im as f64);
    assert!((got - want).norm() < 1e-4 * want.norm(), "{got} vs {want}");
}

#[test]
fn double_gamma_series_constructor() {
    let p = DoubleSeries {
        a: vec![(0.5, 1.0, 1.0)],
        c: vec![(1.5, 1.0)],
        d: vec![(2.0, 1.0)],
        f: vec![(1.5, 1.0)],
        ..Default::default()
    };
    let (pre, spec) = make_srivastava_daoust(&p).unwrap();
    // Gamma(1/2) Gamma(3/2) / (Gamma(2) Gamma(3/2))
    assert!((pre - C::new(std::f64::consts::PI.sqrt(), 0.0)).norm() < 1e-14);
    let cfg = EvalConfig::default().with_tol(1e-13);
    for (z1, z2, want) in [
        (C::new(0.1, 0.0), C::new(0.1, 0.0), C::new(1.912_120_924_747_067_6, 0.0)),
        (C::new(0.2, 0.1), C::new(-0.15, 0.05), C::new(1.807_099_944_498_414_5, 0.106_259_595_119_382_78)),
    ] {
        let v = evaluate(&spec, z1, z2, MethodChoice::Auto, &cfg).unwrap().value;
        assert!((v - want).norm() < 1e-12, "{v} vs {want}");
        assert!((double_series(&p, z1, z2).unwrap() - want).norm() < 1e-13);
    }
}

#[test]
fn wright_bessel_needs_the_series() {
    let spec = make_wright_bessel_product(0.5, 1.0, 0.0, 2.0).unwrap();
    let (z1, z2) = (C::new(1.5, 0.5), C::new(-2.0, 0.0));
    let r = evaluate(&spec, z1, z2, MethodChoice::Auto, &EvalConfig::default()).unwrap();
    assert_eq!(r.method, Method::Series);
    let want = wright_bessel(0.5, 1.0, z1).unwrap() * wright_bessel(0.0, 2.0, z2).unwrap();
    assert!((r.value - want).norm() < 1e-11 * want.norm(), "{} vs {}", r.value, want);
    // Delta = 0 on both axes: the sector is empty, and forcing past the
    // gate finds no decay along the lines
    let err = eval_contour(&spec, z1, z2, &EvalConfig::default()).unwrap_err();
    assert!(matches!(err, Error::NotEstablished), "{err:?}");
    let forced = EvalConfig { force_contour: true, ..EvalConfig::default() };
    let err = eval_contour(&spec, z1, z2, &forced).unwrap_err();
    assert!(matches!(err, Error::NonDecaying { .. }), "{err:?}");
}

#[test]
fn auto_falls_back_past_branch_points() {
    // Gamma(-s)^(3/2): branch points at the residue lattice
    let spec = Spec1::new(Block::new(1, 0, vec![], vec![SingleEntry::real(0.0, 1.0, 1.5)]));
    let cfg = EvalConfig::default().with_tol(1e-10);
    assert!(matches!(evaluate_1var(&spec, C::new(0.5, 0.0), MethodChoice::Series, &cfg), Err(Error::NotApplicable { .. })));
    for (z, want) in [
        (C::new(0.5, 0.0), C::new(0.541_905_248_644_906_3, 0.0)),
        (C::new(0.3, 0.4), C::new(0.502_468_259_324_178_3, -0.409_047_160_247_190_96)),
    ] {
        let r = evaluate_1var(&spec, z, MethodChoice::Auto, &cfg).unwrap();
        assert_eq!(r.method, Method::Contour);
        assert!(r.warnings[0].starts_with("series skipped"), "{:?}", r.warnings);
        assert!((r.value - want).norm() < 1e-9, "{} vs {}", r.value, want);
    }
}
