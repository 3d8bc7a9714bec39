//! Two-dimensional KZ equation: `u = f + g x + xi x^2`, with
//! `xi_yy = 6 xi^2`, `g_yy - 6 g xi = 4 xi_t`, `f_yy - 2 f xi = 2 g_t + g^2`.

use super::sym::{c, free, laurent};
use super::{register, Coeff, Equation, Family, FamilyError, Frame, Mode, XPolySolution};
use crate::paramdsl::ParamFn;
use crate::series::{double_integrate, solve_radial, RadialField, SeriesError, ZeroTest};
use crate::texpr::{ParamTable, TExpr};

/// Data of the blow-up family on `y + beta(t) = 0`.
#[derive(Clone, Debug)]
pub struct Kz2Blowup {
    pub alpha: ParamFn,
    pub beta: ParamFn,
    pub gamma: ParamFn,
    pub sigma: ParamFn,
    pub rho: ParamFn,
}

impl Default for Kz2Blowup {
    fn default() -> Self {
        let z = ParamFn::constant(0.0);
        Kz2Blowup {
            alpha: z.clone(),
            beta: z.clone(),
            gamma: z.clone(),
            sigma: z.clone(),
            rho: z,
        }
    }
}

/// Data of the family polynomial in `x` and `y`.
#[derive(Clone, Debug)]
pub struct Kz2Poly {
    pub alpha: ParamFn,
    pub beta: ParamFn,
    pub gamma: ParamFn,
    pub sigma: ParamFn,
}

impl Default for Kz2Poly {
    fn default() -> Self {
        let z = ParamFn::constant(0.0);
        Kz2Poly {
            alpha: z.clone(),
            beta: z.clone(),
            gamma: z.clone(),
            sigma: z,
        }
    }
}

fn series(e: SeriesError) -> FamilyError {
    FamilyError::Series(e)
}

pub fn build_kz2_blowup(p: &Kz2Blowup, mode: Mode) -> Result<XPolySolution, FamilyError> {
    let mut table = ParamTable::new();
    let a = register(&mut table, "alpha", &p.alpha);
    let b = register(&mut table, "beta", &p.beta);
    let g = register(&mut table, "gamma", &p.gamma);
    let sg = register(&mut table, "sigma", &p.sigma);
    let r = register(&mut table, "rho", &p.rho);
    let base = RadialField::new(1.0, b.clone()).map_err(series)?;
    let xi = laurent(&base, vec![(-2, c(1.0))]);
    let (gf, ff) = match mode {
        Mode::Solver => {
            let names = table.names();
            let zero = ZeroTest::numeric(&table, 0.0);
            let g_rhs = xi.dt().scale_by(4.0);
            let gf = solve_radial(6.0, &g_rhs, &free(&[(-2, &a), (3, &g)]), &zero)
                .map_err(|e| FamilyError::from_series(e, "g", names))?;
            let f_rhs = gf
                .dt()
                .scale_by(2.0)
                .add(&gf.mul(&gf).map_err(series)?)
                .map_err(series)?;
            let ff = solve_radial(2.0, &f_rhs, &free(&[(-1, &sg), (2, &r)]), &zero)
                .map_err(|e| FamilyError::from_series(e, "f", names))?;
            (gf, ff)
        }
        Mode::Formula => {
            let b1 = b.dt();
            let gf = laurent(
                &base,
                vec![(-2, a.clone()), (-1, b1.scale(2.0)), (3, g.clone())],
            );
            let ff = laurent(
                &base,
                vec![
                    (-2, (&a * &a).scale(0.25)),
                    (-1, sg.clone()),
                    (0, -a.dt()),
                    (1, b1.dt().scale(-2.0)),
                    (2, r.clone()),
                    (3, (&a * &g).scale(0.5)),
                    (4, &b1 * &g),
                    (5, g.dt().scale(1.0 / 9.0)),
                    (8, (&g * &g).scale(1.0 / 54.0)),
                ],
            );
            (gf, ff)
        }
    };
    Ok(XPolySolution::new(
        Family::Kz2dBlowup,
        Equation::Kz2d,
        mode,
        table,
        vec![Coeff::Radial(ff), Coeff::Radial(gf), Coeff::Radial(xi)],
        Some(Frame::Line { scale: 1.0, shift: b }),
    ))
}

pub fn build_kz2_poly(p: &Kz2Poly, mode: Mode) -> Result<XPolySolution, FamilyError> {
    let mut table = ParamTable::new();
    let a = register(&mut table, "alpha", &p.alpha);
    let b = register(&mut table, "beta", &p.beta);
    let g = register(&mut table, "gamma", &p.gamma);
    let sg = register(&mut table, "sigma", &p.sigma);
    let base = RadialField::new(1.0, TExpr::zero()).map_err(series)?;
    let gf = laurent(&base, vec![(0, a.clone()), (1, b.clone())]);
    let ff = match mode {
        Mode::Solver => {
            let rhs = gf
                .dt()
                .scale_by(2.0)
                .add(&gf.mul(&gf).map_err(series)?)
                .map_err(series)?;
            double_integrate(&rhs, &g, &sg).map_err(series)?
        }
        Mode::Formula => laurent(
            &base,
            vec![
                (0, g.clone()),
                (1, sg.clone()),
                (2, ((&a * &a) + a.dt().scale(2.0)).scale(0.5)),
                (3, (b.dt() + &a * &b).scale(1.0 / 3.0)),
                (4, (&b * &b).scale(1.0 / 12.0)),
            ],
        ),
    };
    Ok(XPolySolution::new(
        Family::Kz2dPolynomial,
        Equation::Kz2d,
        mode,
        table,
        vec![Coeff::Radial(ff), Coeff::Radial(gf), Coeff::Zero],
        None,
    ))
}
