use num_complex::Complex64;

use super::*;
use crate::jet::OrderBox;

fn pf(s: &str) -> ParamFn {
    ParamFn::parse(s).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// PDE residual and the largest term magnitude at `p`.
fn residual(sol: &XPolySolution, p: [f64; 4]) -> (f64, f64) {
    let eq = sol.equation();
    let u = sol.eval_jet(p, eq.residual_box(), 1e-6).unwrap();
    let d = |i: [u8; 4]| u.partial(i).unwrap();
    let (u0, ux, uxx) = (u.value(), d([0, 1, 0, 0]), d([0, 2, 0, 0]));
    let terms = match eq {
        Equation::Shortwave { k } => vec![
            2.0 * d([1, 1, 0, 0]),
            -2.0 * (p[1] + ux) * uxx,
            d([0, 0, 2, 0]),
            2.0 * k * ux,
        ],
        Equation::Kz2d => vec![2.0 * d([1, 1, 0, 0]), ux * ux, u0 * uxx, -d([0, 0, 2, 0])],
        Equation::Kz3d => vec![
            2.0 * d([1, 1, 0, 0]),
            ux * ux,
            u0 * uxx,
            -d([0, 0, 2, 0]),
            -d([0, 0, 0, 2]),
        ],
    };
    let r: f64 = terms.iter().sum();
    let m = terms.iter().fold(0.0f64, |a, t| a.max(t.abs()));
    (r.abs(), m)
}

fn assert_solves(sol: &XPolySolution, points: &[[f64; 4]], tol: f64) {
    for &p in points {
        let (r, m) = residual(sol, p);
        assert!(r <= tol * m.max(1.0), "{} residual {r:e} (scale {m:e}) at {p:?}", sol.family());
    }
}

fn grid(z: bool) -> Vec<[f64; 4]> {
    let mut out = Vec::new();
    for &t in &[0.1, 0.4, 0.7] {
        for &x in &[-0.8, 0.3, 1.1] {
            for &y in &[0.45, 1.3, 2.1] {
                out.push([t, x, y, if z { 0.35 - 0.2 * y } else { 0.0 }]);
            }
        }
    }
    out
}

fn sw_data(k: f64) -> SwBlowup {
    SwBlowup {
        alpha: pf("cos(t)"),
        beta: pf("t^2/3 - 1"),
        gamma: pf("1 + t"),
        sigma: pf("sin(2*t)"),
        rho: pf("t^3"),
        theta: pf("exp(-t)"),
        vartheta: pf("0.5*t"),
        ..SwBlowup::new(k)
    }
}

#[test]
fn sw_blowup_bare_seed() {
    let sol = build_sw_blowup(&SwBlowup::new(2.0), Mode::Solver).unwrap();
    assert!(rel(sol.eval([0.3, 1.0, 1.0, 0.0], 1e-2).unwrap(), 1.0 / 6.0) < 1e-12);
    assert!(rel(sol.eval([0.0, 2.0, 0.5, 0.0], 1e-2).unwrap(), 8.0 / 1.5) < 1e-12);
    // at x = 0 only f survives, and f vanishes for the bare seed
    assert_eq!(sol.eval([0.2, 0.0, 0.7, 0.0], 1e-2).unwrap(), 0.0);
    assert_solves(&sol, &grid(false), 1e-12);
}

#[test]
fn sw_blowup_forbidden_k() {
    for k in [0.0, 1.0, 3.0] {
        match build_sw_blowup(&SwBlowup::new(k), Mode::Solver) {
            Err(FamilyError::KResonance { k: kk, value }) => {
                assert_eq!(kk, k);
                assert!(rel(value, 2.0 * (k - 2.0) * (1.0 - 2.0 * k) / 9.0) < 1e-12);
            }
            other => panic!("k = {k}: {other:?}"),
        }
        assert!(matches!(
            build_sw_blowup(&SwBlowup::new(k), Mode::Formula),
            Err(FamilyError::KResonance { .. })
        ));
    }
    let msg = build_sw_blowup(&SwBlowup::new(1.0), Mode::Solver)
        .unwrap_err()
        .to_string();
    assert!(msg.contains("(k-2)(1-2k)"), "{msg}");
}

#[test]
fn sw_blowup_solves_pde() {
    for k in [0.5, 2.0] {
        let sol = build_sw_blowup(&sw_data(k), Mode::Solver).unwrap();
        assert_solves(&sol, &grid(false), 1e-9);
    }
}

#[test]
fn sw_poly_examples() {
    let zero = build_sw_poly(&SwPoly::new(2.0), Mode::Solver).unwrap();
    assert_eq!(zero.eval([0.5, 1.0, 2.0, 0.0], 1e-2).unwrap(), 0.0);

    let a = build_sw_poly(&SwPoly { alpha: pf("1"), ..SwPoly::new(2.0) }, Mode::Solver).unwrap();
    // x^2 + 2 y^2 x
    assert!(rel(a.eval([0.0, 1.5, 0.5, 0.0], 1e-2).unwrap(), 2.25 + 0.75) < 1e-12);
    assert_solves(&a, &grid(false), 1e-12);

    let g = build_sw_poly(&SwPoly { gamma: pf("t"), ..SwPoly::new(1.0) }, Mode::Solver).unwrap();
    assert!(rel(g.eval([1.0, 1.0, 1.0, 0.0], 1e-2).unwrap(), -1.0) < 1e-12);
}

#[test]
fn sw_poly_solves_pde() {
    for k in [0.3, 1.0, 2.0] {
        let p = SwPoly {
            alpha: pf("t^2 - 1"),
            beta: pf("sin(t)"),
            gamma: pf("1 + t^3"),
            sigma: pf("exp(t)"),
            rho: pf("cos(t)"),
            tau: pf("t"),
            ..SwPoly::new(k)
        };
        let sol = build_sw_poly(&p, Mode::Solver).unwrap();
        assert_solves(&sol, &grid(false), 1e-9);
    }
}

#[test]
fn kz2_blowup_examples() {
    let b = build_kz2_blowup(&Kz2Blowup { beta: pf("t"), ..Default::default() }, Mode::Solver).unwrap();
    assert!(rel(b.eval([0.0, 2.0, 1.0, 0.0], 1e-2).unwrap(), 8.0) < 1e-12);
    assert_solves(&b, &grid(false), 1e-12);

    let bare = build_kz2_blowup(&Kz2Blowup::default(), Mode::Solver).unwrap();
    assert!(rel(bare.eval([0.0, 3.0, 2.0, 0.0], 1e-2).unwrap(), 2.25) < 1e-12);
    assert_solves(&bare, &grid(false), 1e-12);

    let ab = Kz2Blowup {
        alpha: pf("1"),
        beta: pf("1"),
        ..Default::default()
    };
    let ab = build_kz2_blowup(&ab, Mode::Solver).unwrap();
    assert!(rel(ab.eval([0.0, 0.0, 0.0, 0.0], 1e-2).unwrap(), 0.25) < 1e-12);
    assert!(rel(ab.eval([0.4, 1.5, 1.0, 0.0], 1e-2).unwrap(), 1.0) < 1e-12);
}

fn kz2_data() -> Kz2Blowup {
    Kz2Blowup {
        alpha: pf("1 + t^2"),
        beta: pf("sin(t) - 2"),
        gamma: pf("exp(t/2)"),
        sigma: pf("t"),
        rho: pf("cos(3*t)"),
    }
}

#[test]
fn kz2_blowup_solves_pde() {
    let sol = build_kz2_blowup(&kz2_data(), Mode::Solver).unwrap();
    assert_solves(&sol, &grid(false), 1e-9);
}

#[test]
fn kz2_poly_examples() {
    let a = build_kz2_poly(&Kz2Poly { alpha: pf("1"), ..Default::default() }, Mode::Solver).unwrap();
    assert!(rel(a.eval([0.0, 1.0, 2.0, 0.0], 1e-2).unwrap(), 3.0) < 1e-12);
    let b = build_kz2_poly(&Kz2Poly { beta: pf("1"), ..Default::default() }, Mode::Solver).unwrap();
    assert!(rel(b.eval([0.0, 1.0, 1.0, 0.0], 1e-2).unwrap(), 13.0 / 12.0) < 1e-12);
    let p = Kz2Poly {
        alpha: pf("t^3"),
        beta: pf("cos(t)"),
        gamma: pf("t - 4"),
        sigma: pf("exp(t)"),
    };
    let sol = build_kz2_poly(&p, Mode::Solver).unwrap();
    assert_solves(&sol, &grid(false), 1e-10);
}

fn agree(a: &XPolySolution, b: &XPolySolution, points: &[[f64; 4]], tol: f64) {
    for &p in points {
        let (ua, ub) = (a.eval(p, 1e-2).unwrap(), b.eval(p, 1e-2).unwrap());
        assert!(
            (ua - ub).abs() <= tol * ua.abs().max(1.0),
            "{}: solver {ua} vs formula {ub} at {p:?}",
            a.family()
        );
    }
}

#[test]
fn kz2_modes_agree() {
    let d = kz2_data();
    let s = build_kz2_blowup(&d, Mode::Solver).unwrap();
    let f = build_kz2_blowup(&d, Mode::Formula).unwrap();
    agree(&s, &f, &grid(false), 1e-9);
    let p = Kz2Poly {
        alpha: pf("t^3"),
        beta: pf("cos(t)"),
        gamma: pf("t - 4"),
        sigma: pf("exp(t)"),
    };
    agree(
        &build_kz2_poly(&p, Mode::Solver).unwrap(),
        &build_kz2_poly(&p, Mode::Formula).unwrap(),
        &grid(false),
        1e-12,
    );
}

#[test]
fn sw_blowup_modes_agree() {
    for k in [0.5, 2.0] {
        let d = SwBlowup {
            gamma: pf("0"),
            ..sw_data(k)
        };
        let s = build_sw_blowup(&d, Mode::Solver).unwrap();
        let f = build_sw_blowup(&d, Mode::Formula).unwrap();
        agree(&s, &f, &grid(false), 1e-9);
    }
}

#[test]
fn sw_blowup_printed_s10_term() {
    // The printed s^10 coefficient of f is -2 gamma((k+1)gamma + 3gamma')/32805;
    // the recurrence gives -5 gamma(...)/32805.
    for k in [0.5, 2.0] {
        let d = sw_data(k);
        let s = build_sw_blowup(&d, Mode::Solver).unwrap();
        let f = build_sw_blowup(&d, Mode::Formula).unwrap();
        assert_solves(&s, &grid(false), 1e-9);
        for &p in &grid(false) {
            let (t, y) = (p[0], p[2]);
            let (g, g1) = (1.0 + t, 1.0);
            let sv = 6f64.sqrt() * y + t * t / 3.0 - 1.0;
            let expect = -3.0 * g * ((k + 1.0) * g + 3.0 * g1) / 32805.0 * sv.powi(10);
            let a = s.coeff_jets(t, y, 0.0, OrderBox::SCALAR, 1e-2).unwrap();
            let b = f.coeff_jets(t, y, 0.0, OrderBox::SCALAR, 1e-2).unwrap();
            assert!((a[0].value() - b[0].value() - expect).abs() <= 1e-9 * expect.abs().max(1.0));
            for m in 1..4 {
                assert!(rel(a[m].value(), b[m].value()) < 1e-9 || a[m].value().abs() < 1e-12);
            }
        }
    }
}

#[test]
fn kz3_blowup_examples() {
    let bare = build_kz3_blowup(&Kz3Blowup::default(), Mode::Solver).unwrap();
    assert!(rel(bare.eval([0.2, 3.0, 2.0, 0.7], 1e-2).unwrap(), 2.25) < 1e-12);

    let g1 = Kz3Blowup {
        gamma1: pf("1"),
        ..Default::default()
    };
    let sol = build_kz3_blowup(&g1, Mode::Solver).unwrap();
    assert!(rel(sol.eval([0.3, 1.0, 1.0, 0.0], 1e-2).unwrap(), 1.25) < 1e-12);
    assert!(rel(sol.eval([0.0, 0.5, 2.0, 1.0], 1e-2).unwrap(), 0.5) < 1e-12);
    assert_solves(&sol, &grid(true), 1e-12);
}

fn kz3_data() -> Kz3Blowup {
    Kz3Blowup {
        gamma0: pf("1 + t"),
        gamma1: pf("sin(t)"),
        gamma2: pf("1/(2 - t)"),
        beta: pf("t^2 - 3"),
        sigma: vec![pf("t"), pf("1"), pf("cos(t)")],
        kappa: vec![pf("exp(t)"), pf("0"), pf("t^2")],
        omega: vec![pf("2"), pf("t")],
        ..Default::default()
    }
}

#[test]
fn kz3_blowup_solves_pde() {
    let sol = build_kz3_blowup(&kz3_data(), Mode::Solver).unwrap();
    assert_solves(&sol, &grid(true), 1e-9);
}

#[test]
fn kz3_formula_needs_audit() {
    assert!(matches!(
        build_kz3_blowup(&kz3_data(), Mode::Formula),
        Err(FamilyError::AuditRequired)
    ));
}

#[test]
fn kz3_modes_agree_without_gamma2() {
    let d = Kz3Blowup {
        gamma2: pf("0"),
        ..kz3_data()
    };
    let s = build_kz3_blowup(&d, Mode::Solver).unwrap();
    let f = build_kz3_blowup(&d, Mode::Formula).unwrap();
    agree(&s, &f, &grid(true), 1e-9);
}

#[test]
fn kz3_gamma2_constant_differs() {
    let d = Kz3Blowup {
        gamma2: pf("1/(2 - t)"),
        audit: true,
        ..Default::default()
    };
    let s = build_kz3_blowup(&d, Mode::Solver).unwrap();
    let f = build_kz3_blowup(&d, Mode::Formula).unwrap();
    assert_solves(&s, &grid(true), 1e-9);
    for &p in &grid(true) {
        let g2 = 1.0 / (2.0 - p[0]);
        let gs = s.coeff_jets(p[0], p[2], p[3], OrderBox::SCALAR, 1e-2).unwrap()[1].value();
        let gf = f.coeff_jets(p[0], p[2], p[3], OrderBox::SCALAR, 1e-2).unwrap()[1].value();
        assert!((gs - gf - g2 / 6.0).abs() < 1e-10, "{gs} {gf} {g2}");
    }
    let worst = grid(true)
        .iter()
        .map(|&p| {
            let (r, m) = residual(&f, p);
            r / m.max(1.0)
        })
        .fold(0.0, f64::max);
    assert!(worst > 1e-6, "formula residual {worst}");
}

#[test]
fn kz3_explicit_alpha_breaks_constraint() {
    let d = Kz3Blowup {
        gamma2: pf("1/(2 - t)"),
        alpha: AlphaSpec::Explicit(pf("t")),
        ..Default::default()
    };
    match build_kz3_blowup(&d, Mode::Solver) {
        Err(FamilyError::Resonance { field, index, .. }) => {
            assert_eq!(field, "f");
            assert_eq!(index, 0);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn harmonic_examples() {
    let zero = build_kz3_harmonic(&Harmonic::default(), Mode::Solver).unwrap();
    assert_eq!(zero.eval([1.0, 1.0, 1.0, 1.0], 1e-2).unwrap(), 0.0);

    let s = Harmonic {
        sigma: vec![pf("t")],
        ..Default::default()
    };
    let s = build_kz3_harmonic(&s, Mode::Solver).unwrap();
    assert!(rel(s.eval([1.0, 1.0, 1.0, 1.0], 1e-2).unwrap(), 6.0) < 1e-12);
    assert_solves(&s, &grid(true), 1e-12);

    let r = Harmonic {
        rho: vec![pf("0"), pf("1")],
        ..Default::default()
    };
    let r = build_kz3_harmonic(&r, Mode::Solver).unwrap();
    assert!(rel(r.eval([0.0, 1.0, 1.0, 1.0], 1e-2).unwrap(), -1.5) < 1e-12);
    assert_solves(&r, &grid(true), 1e-12);
}

#[test]
fn harmonic_general_solves_pde() {
    let h = Harmonic {
        sigma: vec![pf("t"), pf("cos(t)"), pf("1")],
        rho: vec![pf("2"), pf("0"), pf("t^2"), pf("0.5")],
        kappa: vec![pf("exp(t)"), pf("1"), pf("0"), pf("t")],
        omega: vec![pf("0"), pf("sin(t)"), pf("3")],
        w1: Complex64::new(0.4, -1.2),
    };
    let sol = build_kz3_harmonic(&h, Mode::Solver).unwrap();
    assert_solves(&sol, &grid(true), 1e-10);
}

#[test]
fn elliptic_examples() {
    let kz2 = build_elliptic(Equation::Kz2d, 1.0, 1.0, 0.0).unwrap();
    let (r, m) = residual(&kz2, [0.0, 1.0, 0.3, 0.0]);
    assert!(r <= 1e-9 * m);

    let kz3 = build_elliptic(Equation::Kz3d, 1.0, 1.0, 0.0).unwrap();
    for &p in &grid(true) {
        let a = kz3.eval(p, 1e-3).unwrap();
        let b = kz2.eval([p[0], p[1], p[2], 0.0], 1e-3).unwrap();
        assert!(rel(a, b) < 1e-14);
    }
    assert!(matches!(
        build_elliptic(Equation::Kz3d, 1.0, 1.0, 1.0),
        Err(FamilyError::Normalization(_))
    ));
    assert!(matches!(
        build_elliptic(Equation::Kz2d, 0.0, 1.0, 0.0),
        Err(FamilyError::Elliptic(_))
    ));

    let sw = build_elliptic(Equation::Shortwave { k: 2.0 }, 0.5, 0.0, 0.0).unwrap();
    assert_solves(&sw, &grid(false), 1e-9);
    assert!(build_elliptic(Equation::Shortwave { k: 0.5 }, 0.5, 0.0, 0.0).is_err());

    let (c, s) = (0.6f64, 0.8f64);
    let tilted = build_elliptic(Equation::Kz3d, 3.0, c, s).unwrap();
    assert_solves(&tilted, &grid(true), 1e-9);
}

#[test]
fn surfaces() {
    let sw = build_sw_blowup(&SwBlowup { beta: pf("t"), ..SwBlowup::new(2.0) }, Mode::Solver).unwrap();
    match sw.surface(0.6).unwrap() {
        Surface::Line { y } => assert!(rel(y, -0.6 / 6f64.sqrt()) < 1e-14),
        s => panic!("{s}"),
    }
    let poly = build_kz2_poly(&Kz2Poly::default(), Mode::Solver).unwrap();
    assert_eq!(poly.surface(0.0).unwrap(), Surface::None);
    let sol = build_kz2_blowup(&Kz2Blowup { beta: pf("t"), ..Default::default() }, Mode::Solver).unwrap();
    assert!(matches!(
        sol.eval([0.5, 1.0, -0.5 + 1e-7, 0.0], 1e-6),
        Err(FieldError::Pole { .. })
    ));
    assert!(sol.eval([0.5, 1.0, -0.4, 0.0], 1e-6).is_ok());
}

#[test]
fn documents_round_trip() {
    let sols = vec![
        build_sw_blowup(&sw_data(2.0), Mode::Solver).unwrap(),
        build_sw_blowup(&sw_data(0.5), Mode::Formula).unwrap(),
        build_kz2_blowup(&kz2_data(), Mode::Solver).unwrap(),
        build_kz3_blowup(&kz3_data(), Mode::Solver).unwrap(),
        build_kz3_harmonic(
            &Harmonic {
                sigma: vec![pf("t"), pf("1")],
                omega: vec![pf("0"), pf("0"), pf("t")],
                w1: Complex64::new(1.0, 2.0),
                ..Default::default()
            },
            Mode::Solver,
        )
        .unwrap(),
        build_elliptic(Equation::Kz3d, 2.0, 0.6, 0.8).unwrap(),
    ];
    for sol in sols {
        let doc = sol.to_doc();
        let text = serde_json::to_string(&doc).unwrap();
        let back: SolutionDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
        let re = back.to_solution().unwrap();
        for &p in &grid(true) {
            let p = if sol.equation().has_z() { p } else { [p[0], p[1], p[2], 0.0] };
            assert_eq!(sol.eval(p, 1e-3).unwrap(), re.eval(p, 1e-3).unwrap());
        }
    }
}
