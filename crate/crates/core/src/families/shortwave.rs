//! Short-wave equation: `u = f + g x + h x^2 + xi x^3`, with
//! `xi_yy = 36 xi^2`, `h_yy = 6 xi (6h + 2 - k) - 6 xi_t`,
//! `g_yy = 8h^2 + 4(1-k)h + 12 xi g - 4 h_t`, `f_yy = 4gh - 2g_t - 2kg`.

use super::sym::{c, free, laurent};
use super::{register, Coeff, Equation, Family, FamilyError, Frame, Mode, XPolySolution};
use crate::paramdsl::ParamFn;
use crate::series::{double_integrate, solve_radial, RadialField, SeriesError, ZeroTest};
use crate::texpr::{ParamTable, TExpr};

/// Data of the blow-up family on `sqrt(6) y + beta(t) = 0`.
#[derive(Clone, Debug)]
pub struct SwBlowup {
    pub k: f64,
    pub alpha: ParamFn,
    pub beta: ParamFn,
    pub gamma: ParamFn,
    pub sigma: ParamFn,
    pub rho: ParamFn,
    pub theta: ParamFn,
    pub vartheta: ParamFn,
}

impl SwBlowup {
    pub fn new(k: f64) -> SwBlowup {
        let z = ParamFn::constant(0.0);
        SwBlowup {
            k,
            alpha: z.clone(),
            beta: z.clone(),
            gamma: z.clone(),
            sigma: z.clone(),
            rho: z.clone(),
            theta: z.clone(),
            vartheta: z,
        }
    }
}

/// Data of the family polynomial in `x` and `y`.
#[derive(Clone, Debug)]
pub struct SwPoly {
    pub k: f64,
    pub alpha: ParamFn,
    pub beta: ParamFn,
    pub gamma: ParamFn,
    pub sigma: ParamFn,
    pub rho: ParamFn,
    pub tau: ParamFn,
}

impl SwPoly {
    pub fn new(k: f64) -> SwPoly {
        let z = ParamFn::constant(0.0);
        SwPoly {
            k,
            alpha: z.clone(),
            beta: z.clone(),
            gamma: z.clone(),
            sigma: z.clone(),
            rho: z.clone(),
            tau: z,
        }
    }
}

fn series(e: SeriesError) -> FamilyError {
    FamilyError::Series(e)
}

fn k_resonance(k: f64) -> FamilyError {
    FamilyError::KResonance {
        k,
        value: 2.0 * (k - 2.0) * (1.0 - 2.0 * k) / 9.0,
    }
}

fn check_k(k: f64) -> Result<(), FamilyError> {
    if !k.is_finite() {
        return Err(FamilyError::Invalid(format!("k must be finite, got {k}")));
    }
    if k == 0.5 || k == 2.0 {
        Ok(())
    } else {
        Err(k_resonance(k))
    }
}

struct Syms {
    alpha: TExpr,
    beta: TExpr,
    gamma: TExpr,
    sigma: TExpr,
    rho: TExpr,
    theta: TExpr,
    vartheta: TExpr,
}

fn blowup_syms(p: &SwBlowup) -> (ParamTable, Syms) {
    let mut t = ParamTable::new();
    let s = Syms {
        alpha: register(&mut t, "alpha", &p.alpha),
        beta: register(&mut t, "beta", &p.beta),
        gamma: register(&mut t, "gamma", &p.gamma),
        sigma: register(&mut t, "sigma", &p.sigma),
        rho: register(&mut t, "rho", &p.rho),
        theta: register(&mut t, "theta", &p.theta),
        vartheta: register(&mut t, "vartheta", &p.vartheta),
    };
    (t, s)
}

/// Builds the blow-up family; `k` must be `1/2` or `2`.
pub fn build_sw_blowup(p: &SwBlowup, mode: Mode) -> Result<XPolySolution, FamilyError> {
    let (table, s) = blowup_syms(p);
    let base = RadialField::new(6f64.sqrt(), s.beta.clone()).map_err(series)?;
    let coeffs = match mode {
        Mode::Solver => blowup_solver(p.k, &s, &base, &table)?,
        Mode::Formula => {
            check_k(p.k)?;
            blowup_formula(p.k, &s, &base)?
        }
    };
    Ok(XPolySolution::new(
        Family::ShortwaveBlowup,
        Equation::Shortwave { k: p.k },
        mode,
        table,
        coeffs.into_iter().map(Coeff::Radial).collect(),
        Some(Frame::Line {
            scale: base.scale(),
            shift: s.beta.clone(),
        }),
    ))
}

fn blowup_solver(
    k: f64,
    s: &Syms,
    base: &RadialField,
    table: &ParamTable,
) -> Result<Vec<RadialField>, FamilyError> {
    if !k.is_finite() {
        return Err(FamilyError::Invalid(format!("k must be finite, got {k}")));
    }
    let names = table.names();
    let zero = ZeroTest::structural();
    let xi = laurent(base, vec![(-2, c(1.0))]);
    // h_yy - 36 xi h = 6(2-k) xi - 6 xi_t
    let h_rhs = xi.scale_by(6.0 * (2.0 - k)).sub(&xi.dt().scale_by(6.0)).map_err(series)?;
    let h = solve_radial(6.0, &h_rhs, &free(&[(-2, &s.alpha), (3, &s.gamma)]), &zero)
        .map_err(|e| FamilyError::from_series(e, "h", names))?;
    // g_yy - 12 xi g = 8h^2 + 4(1-k)h - 4h_t
    let g_rhs = h
        .mul(&h)
        .map_err(series)?
        .scale_by(8.0)
        .add(&h.scale_by(4.0 * (1.0 - k)))
        .and_then(|r| r.sub(&h.dt().scale_by(4.0)))
        .map_err(series)?;
    let g = match solve_radial(2.0, &g_rhs, &free(&[(-1, &s.sigma), (2, &s.rho)]), &zero) {
        Ok(g) => g,
        Err(SeriesError::Resonance { index: 0, coeff }) if coeff.as_constant().is_some() => {
            return Err(k_resonance(k));
        }
        Err(e) => return Err(FamilyError::from_series(e, "g", names)),
    };
    // f_yy = 4gh - 2g_t - 2kg
    let f_rhs = g
        .mul(&h)
        .map_err(series)?
        .scale_by(4.0)
        .sub(&g.dt().scale_by(2.0))
        .and_then(|r| r.sub(&g.scale_by(2.0 * k)))
        .map_err(series)?;
    let f = double_integrate(&f_rhs, &s.theta, &s.vartheta).map_err(series)?;
    Ok(vec![f, g, h, xi])
}

fn blowup_formula(k: f64, s: &Syms, base: &RadialField) -> Result<Vec<RadialField>, FamilyError> {
    let kp = k + 1.0;
    let (a, b, g, sg, r) = (&s.alpha, &s.beta, &s.gamma, &s.sigma, &s.rho);
    let a1 = a.dt();
    let a2 = a1.dt();
    let b1 = b.dt();
    let b2 = b1.dt();
    let b3 = b2.dt();
    let g1 = g.dt();
    let g2 = g1.dt();
    let sg1 = sg.dt();
    let r1 = r.dt();
    let xi = laurent(base, vec![(-2, c(1.0))]);
    let h = laurent(
        base,
        vec![
            (-2, a.clone()),
            (-1, b1.scale(-0.5)),
            (0, c((k - 2.0) / 6.0)),
            (3, g.clone()),
        ],
    );
    let gf = laurent(
        base,
        vec![
            (-2, (a * a).scale(1.0 / 3.0)),
            (-1, sg.clone()),
            (0, (a.scale(kp) + a1.scale(3.0)).scale(1.0 / 9.0)),
            (1, (b1.scale(kp) + b2.scale(3.0)).scale(-1.0 / 18.0)),
            (2, r.clone()),
            (3, (a * g).scale(2.0 / 3.0)),
            (4, (&b1 * g).scale(-1.0 / 3.0)),
            (5, (g.scale(kp) + g1.scale(3.0)).scale(-1.0 / 81.0)),
            (8, (g * g).scale(2.0 / 81.0)),
        ],
    );
    let mut f = laurent(
        base,
        vec![
            (-2, a.pow(3).scale(1.0 / 27.0)),
            (-1, ((a * sg).scale(6.0) + &(a * a) * &b1).scale(1.0 / 18.0)),
            (0, s.theta.clone()),
            (
                3,
                (&(a * a) * g).scale(1.0 / 9.0) - (&b1 * r).scale(1.0 / 6.0)
                    + (&b3 + &b2.scale(kp)).scale(1.0 / 108.0)
                    + b1.scale(kp * kp / 486.0),
            ),
            (
                4,
                ((g * sg).scale(2.0) - r1.clone()).scale(1.0 / 36.0)
                    - (r.scale(kp) + (&(a * &b1) * g).scale(5.0)).scale(1.0 / 54.0),
            ),
            (
                5,
                (&(&b1 * &b1) * g).scale(1.0 / 36.0)
                    - ((a * g).scale(kp) + (a * &g1).scale(3.0)).scale(1.0 / 243.0),
            ),
            (6, ((&b1 * g).scale(kp) + (&b1 * &g1).scale(3.0)).scale(1.0 / 486.0)),
            (
                7,
                (g * r).scale(1.0 / 63.0)
                    + g.scale(kp * kp / 15309.0)
                    + (g1.scale(kp) + g2.clone()).scale(1.0 / 3402.0),
            ),
            (8, (a * &(g * g)).scale(2.0 / 243.0)),
            (9, (&b1 * &(g * g)).scale(-1.0 / 243.0)),
            (10, (g * &(g.scale(kp) + g1.scale(3.0))).scale(-2.0 / 32805.0)),
            (13, g.pow(3).scale(1.0 / 9477.0)),
        ],
    );
    let log_c = (sg.scale(6.0 * kp)
        + (a * &b2).scale(3.0)
        + (a * &b1).scale(2.0 * kp)
        + (&a1 * &b1).scale(3.0)
        + sg1.scale(9.0))
    .scale(-1.0 / 27.0);
    f.add_term(1, 1, log_c.clone());
    f.add_term(1, 0, -log_c);
    let y = base.y();
    let y2c = (a * r).scale(2.0) + (&b1 * &b1).scale(kp / 9.0)
        + (&(&b1 * &b2) - &a1.scale(kp) - a2).scale(1.0 / 3.0)
        + a.scale(-2.0 * kp * kp / 27.0);
    let f = f
        .add(&y.mul(&y).map_err(series)?.mul_texpr(&y2c))
        .and_then(|f| f.add(&y.mul_texpr(&s.vartheta)))
        .map_err(series)?;
    Ok(vec![f, gf, h, xi])
}

struct PolySyms {
    alpha: TExpr,
    beta: TExpr,
    gamma: TExpr,
    sigma: TExpr,
    rho: TExpr,
    tau: TExpr,
}

/// Builds the family polynomial in `x` and `y`.
pub fn build_sw_poly(p: &SwPoly, mode: Mode) -> Result<XPolySolution, FamilyError> {
    if !p.k.is_finite() {
        return Err(FamilyError::Invalid(format!("k must be finite, got {}", p.k)));
    }
    let mut table = ParamTable::new();
    let s = PolySyms {
        alpha: register(&mut table, "alpha", &p.alpha),
        beta: register(&mut table, "beta", &p.beta),
        gamma: register(&mut table, "gamma", &p.gamma),
        sigma: register(&mut table, "sigma", &p.sigma),
        rho: register(&mut table, "rho", &p.rho),
        tau: register(&mut table, "tau", &p.tau),
    };
    let base = RadialField::new(1.0, TExpr::zero()).map_err(series)?;
    let coeffs = match mode {
        Mode::Solver => poly_solver(p.k, &s, &base)?,
        Mode::Formula => poly_formula(p.k, &s, &base),
    };
    let mut coeffs: Vec<Coeff> = coeffs.into_iter().map(Coeff::Radial).collect();
    coeffs.push(Coeff::Zero);
    Ok(XPolySolution::new(
        Family::ShortwavePolynomial,
        Equation::Shortwave { k: p.k },
        mode,
        table,
        coeffs,
        None,
    ))
}

fn poly_solver(k: f64, s: &PolySyms, base: &RadialField) -> Result<Vec<RadialField>, FamilyError> {
    let h = laurent(base, vec![(0, s.alpha.clone()), (1, s.beta.clone())]);
    let g_rhs = h
        .mul(&h)
        .map_err(series)?
        .scale_by(8.0)
        .add(&h.scale_by(4.0 * (1.0 - k)))
        .and_then(|r| r.sub(&h.dt().scale_by(4.0)))
        .map_err(series)?;
    let g = double_integrate(&g_rhs, &s.gamma, &s.sigma).map_err(series)?;
    let f_rhs = g
        .mul(&h)
        .map_err(series)?
        .scale_by(4.0)
        .sub(&g.dt().scale_by(2.0))
        .and_then(|r| r.sub(&g.scale_by(2.0 * k)))
        .map_err(series)?;
    let f = double_integrate(&f_rhs, &s.tau, &s.rho).map_err(series)?;
    Ok(vec![f, g, h])
}

fn poly_formula(k: f64, s: &PolySyms, base: &RadialField) -> Vec<RadialField> {
    let (a, b, g, sg) = (&s.alpha, &s.beta, &s.gamma, &s.sigma);
    let a1 = a.dt();
    let a2 = a1.dt();
    let b1 = b.dt();
    let b2 = b1.dt();
    let h = laurent(base, vec![(0, a.clone()), (1, b.clone())]);
    let gf = laurent(
        base,
        vec![
            (0, g.clone()),
            (1, sg.clone()),
            (2, ((a * a).scale(2.0) + a.scale(1.0 - k) - a1.clone()).scale(2.0)),
            (
                3,
                ((a * b).scale(4.0) + b.scale(1.0 - k) - b1.clone()).scale(2.0 / 3.0),
            ),
            (4, (b * b).scale(2.0 / 3.0)),
        ],
    );
    // transcribed as printed, including the y^5 term that lacks its beta factor
    let f = laurent(
        base,
        vec![
            (0, s.tau.clone()),
            (1, s.rho.clone()),
            (2, (a * g).scale(2.0) - g.dt() - g.scale(k)),
            (
                3,
                ((a * sg).scale(2.0) + (b * g).scale(2.0) - sg.dt() - g.scale(k)).scale(1.0 / 3.0),
            ),
            (
                4,
                (a.pow(3).scale(4.0)
                    + (a * a).scale(2.0 * (1.0 - 2.0 * k))
                    + (a * &a1).scale(-6.0)
                    + a.scale(k * (k - 1.0))
                    + a1.scale(2.0 * k - 1.0)
                    + a2.clone()
                    + b * sg)
                    .scale(1.0 / 3.0),
            ),
            (
                5,
                (a.scale(1.0 - k) - a1.clone()).scale(2.0 / 5.0)
                    + (&(a * a) * b).scale(20.0 / 15.0)
                    + (a * b).scale(2.0 * (1.0 - 3.0 * k) / 15.0)
                    + (a * &b1).scale(-6.0 / 15.0)
                    + (&a1 * b).scale(-4.0 / 15.0)
                    + b1.scale((2.0 * k - 1.0) / 15.0)
                    + b2.scale(1.0 / 15.0)
                    + b.scale(-k * (1.0 - k) / 15.0),
            ),
            (
                6,
                ((a * &(b * b)).scale(10.0) + (b * b).scale(2.0 - 3.0 * k) + (b * &b1).scale(-4.0))
                    .scale(2.0 / 45.0),
            ),
            (7, b.pow(3).scale(4.0 / 63.0)),
        ],
    );
    vec![f, gf, h]
}
