//! Three-dimensional KZ blow-up family in the moving frame
//! `zeta = cos(alpha) y + sin(alpha) z + beta`, `eta = -sin(alpha) y + cos(alpha) z`.
//! The coefficient system is the two-dimensional one with `d_yy` replaced by
//! `d_zeta^2 + d_eta^2` and `d_t` by the frame derivative.

use std::collections::BTreeMap;

use super::sym::c;
use super::{register, AlphaFn, Coeff, Equation, Family, FamilyError, Frame, Mode, XPolySolution};
use crate::paramdsl::ParamFn;
use crate::series::{
    complex_even_part, solve_eta, solve_radial_eta, total_t_derivative, BiField, EtaPoly, ZeroTest,
};
use crate::texpr::{ParamSource, ParamTable, TExpr};

/// How the frame angle is obtained.
#[derive(Clone, Debug)]
pub enum AlphaSpec {
    /// `alpha' = (epsilon/3) sqrt(6 gamma2' - 5 gamma2^2)`, `alpha(t0) = alpha0`.
    FromGamma2 { epsilon: f64, t0: f64, alpha0: f64 },
    /// A caller-chosen angle; the quadratic-coefficient constraint is then
    /// checked by the solver rather than satisfied by construction.
    Explicit(ParamFn),
}

#[derive(Clone, Debug)]
pub struct Kz3Blowup {
    pub gamma0: ParamFn,
    pub gamma1: ParamFn,
    pub gamma2: ParamFn,
    pub beta: ParamFn,
    /// Coefficients of `sigma(t, eta)` in ascending powers of `eta`.
    pub sigma: Vec<ParamFn>,
    pub kappa: Vec<ParamFn>,
    pub omega: Vec<ParamFn>,
    pub alpha: AlphaSpec,
    /// Allows formula mode with `gamma2 != 0`.
    pub audit: bool,
}

impl Default for Kz3Blowup {
    fn default() -> Self {
        let z = ParamFn::constant(0.0);
        Kz3Blowup {
            gamma0: z.clone(),
            gamma1: z.clone(),
            gamma2: z.clone(),
            beta: z,
            sigma: Vec::new(),
            kappa: Vec::new(),
            omega: Vec::new(),
            alpha: AlphaSpec::FromGamma2 {
                epsilon: 1.0,
                t0: 0.0,
                alpha0: 0.0,
            },
            audit: false,
        }
    }
}

fn eta_poly(table: &mut ParamTable, name: &str, coeffs: &[ParamFn]) -> EtaPoly {
    EtaPoly::from_coeffs(
        coeffs
            .iter()
            .enumerate()
            .map(|(j, f)| register(table, &format!("{name}_{j}"), f))
            .collect(),
    )
}

/// `int_0^zeta` of a field with nonnegative powers only.
fn integrate0(f: &BiField) -> BiField {
    let mut out = BiField::zero();
    for (p, cf) in f.terms() {
        debug_assert!(p >= 0);
        out.add_term(p + 1, cf.scale(1.0 / (p + 1) as f64));
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

pub fn build_kz3_blowup(p: &Kz3Blowup, mode: Mode) -> Result<XPolySolution, FamilyError> {
    if mode == Mode::Formula && !p.gamma2.is_zero() && !p.audit {
        return Err(FamilyError::AuditRequired);
    }
    let mut table = ParamTable::new();
    let g0 = register(&mut table, "gamma0", &p.gamma0);
    let g1 = register(&mut table, "gamma1", &p.gamma1);
    let g2 = register(&mut table, "gamma2", &p.gamma2);
    let beta = register(&mut table, "beta", &p.beta);
    let (alpha, origin) = match &p.alpha {
        AlphaSpec::FromGamma2 {
            epsilon,
            t0,
            alpha0,
        } => {
            let a = AlphaFn::new(p.gamma2.clone(), *epsilon, *t0, *alpha0)?;
            let id = table.insert("alpha", ParamSource::Alpha(a));
            (TExpr::param(id), *t0)
        }
        AlphaSpec::Explicit(f) => (register(&mut table, "alpha", f), 0.0),
    };
    let sigma = eta_poly(&mut table, "sigma", &p.sigma);
    let kappa = eta_poly(&mut table, "kappa", &p.kappa);
    let omega = eta_poly(&mut table, "omega", &p.omega);
    let rho = EtaPoly::from_coeffs(vec![g0, g1, g2.clone()]);
    let xi = BiField::term(-2, EtaPoly::constant(c(1.0)));
    let dt = |f: &BiField| total_t_derivative(f, &alpha, &beta);

    let (g, f) = match mode {
        Mode::Solver => {
            let names = table.names();
            let zero = ZeroTest::numeric(&table, origin);
            let g_rhs = dt(&xi).scale(4.0);
            let free = BTreeMap::from([(-2, rho.clone()), (3, sigma.clone())]);
            let g = solve_eta(6.0, &g_rhs, &free, &zero)
                .map_err(|e| FamilyError::from_series(e, "g", names))?;
            let b = dt(&g).scale(2.0).add(&g.mul(&g));
            let f = solve_radial_eta(&b, &kappa, &omega, &zero)
                .map_err(|e| FamilyError::from_series(e, "f", names))?;
            (g, f)
        }
        Mode::Formula => {
            let a1 = alpha.dt();
            let b1 = beta.dt();
            let lin = EtaPoly::from_coeffs(vec![b1.clone(), a1.clone()]);
            // 15 zeta^-2 int tau3 int tau2 int E_sigma
            let e = complex_even_part(&sigma);
            let i1 = integrate0(&e);
            let i2 = integrate0(&BiField::zeta().mul(&i1));
            let i3 = integrate0(&BiField::zeta().mul(&i2));
            let g = BiField::term(-2, rho.clone())
                .add(&BiField::term(-1, lin.scale(2.0)))
                .add(&BiField::term(0, EtaPoly::constant(g2.scale(1.0 / 6.0))))
                .add(&BiField::term(-2, EtaPoly::constant(c(15.0))).mul(&i3));
            let b = dt(&g).scale(2.0).add(&g.mul(&g));
            let f = formula_f(&b, &rho, &kappa, &omega, &alpha, &beta, &g2);
            (g, f)
        }
    };
    Ok(XPolySolution::new(
        Family::Kz3dBlowup,
        Equation::Kz3d,
        mode,
        table,
        vec![Coeff::Bi(f), Coeff::Bi(g), Coeff::Bi(xi)],
        Some(Frame::Plane { alpha, beta }),
    ))
}

/// The closed form of `f`: even-part integrals of `kappa` and `omega`, the
/// finite double sums over the positive-power forcing, and the low-order
/// terms.
fn formula_f(
    b: &BiField,
    rho: &EtaPoly,
    kappa: &EtaPoly,
    omega: &EtaPoly,
    alpha: &TExpr,
    beta: &TExpr,
    g2: &TExpr,
) -> BiField {
    let zinv = BiField::term(-1, EtaPoly::constant(c(1.0)));
    let kpart = BiField::zeta()
        .mul(&zinv.mul(&complex_even_part(kappa)).d_zeta())
        .scale(-1.0);
    let wi1 = integrate0(&complex_even_part(omega));
    let wpart = zinv
        .mul(&integrate0(&BiField::zeta().mul(&wi1)))
        .scale(3.0);
    let mut phi = kpart.add(&wpart);

    let top = b.max_power().unwrap_or(0).max(0) as usize;
    let deg = b
        .terms()
        .filter_map(|(_, cf)| cf.degree())
        .max()
        .unwrap_or(0);
    let bi = |i: usize| if i <= top { b.coeff(i as i32) } else { EtaPoly::zero() };
    let d2 = |p: &EtaPoly, n: usize| (0..2 * n).fold(p.clone(), |acc, _| acc.d_eta());
    for k in 0..=(top + deg) / 2 + 2 {
        let mut odd = EtaPoly::zero();
        let mut even = EtaPoly::zero();
        for i in 0..=k {
            let sign = if (k - i) % 2 == 0 { 1.0 } else { -1.0 };
            let co = sign * (i + 1) as f64 * factorial(2 * i)
                / ((k + 2) as f64 * factorial(2 * k + 2));
            odd = odd.add(&d2(&bi(2 * i + 1), k - i).scale(co));
            let ce = sign * (2 * i + 3) as f64 * factorial(2 * i + 1)
                / ((2 * k + 5) as f64 * factorial(2 * k + 3));
            even = even.add(&d2(&bi(2 * i + 2), k - i).scale(ce));
        }
        phi.add_term(2 * k as i32 + 3, odd);
        phi.add_term(2 * k as i32 + 4, even);
    }

    let a1 = alpha.dt();
    let a2 = a1.dt();
    let b1 = beta.dt();
    let b2 = b1.dt();
    let rho_eta = rho.d_eta();
    let c0 = rho_eta
        .mul(&rho_eta)
        .scale(0.25)
        .sub(&rho.dt_explicit())
        .sub(&rho_eta.mul_texpr(&(&a1 * beta)))
        .add(&rho.mul_texpr(&g2.scale(1.0 / 6.0)));
    let lin = EtaPoly::from_coeffs(vec![b1, a1.clone()]);
    let bracket = EtaPoly::from_coeffs(vec![
        (&b2 + &(&(&a1 * &a1) * beta)).scale(2.0),
        a2.scale(2.0),
    ])
    .sub(&rho_eta.mul_texpr(&a1))
    .add(&lin.mul_texpr(&g2.scale(2.0 / 3.0)));
    phi.add(&BiField::term(-2, rho.mul(rho).scale(0.25)))
        .add(&BiField::term(0, c0))
        .add(&BiField::term(1, bracket.scale(-1.0)))
}
