//! Three-dimensional KZ solutions polynomial in `x, y, z`: `xi = 0`, `g`
//! harmonic and `4 f_{w wbar} = 2 g_t + g^2` with `w = y + i z`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{register, Coeff, Equation, Family, FamilyError, Mode, PolyYZ, XPolySolution};
use crate::paramdsl::ParamFn;
use crate::texpr::{ParamTable, TExpr};

/// Coefficients of a polynomial in `mu`, ascending, each a function of `t`.
pub type MuPoly = Vec<ParamFn>;

#[derive(Clone, Debug, Default)]
pub struct Harmonic {
    pub sigma: MuPoly,
    pub rho: MuPoly,
    pub kappa: MuPoly,
    pub omega: MuPoly,
    /// Base point of the double antiderivative.
    pub w1: Complex64,
}

/// Complex coefficient `(re, im)`.
type CExpr = (TExpr, TExpr);

fn cmul(a: &CExpr, b: &CExpr) -> CExpr {
    (&(&a.0 * &b.0) - &(&a.1 * &b.1), &(&a.0 * &b.1) + &(&a.1 * &b.0))
}

fn cscale(a: &CExpr, k: Complex64) -> CExpr {
    (
        &a.0.scale(k.re) - &a.1.scale(k.im),
        &a.0.scale(k.im) + &a.1.scale(k.re),
    )
}

/// Polynomial in `w` and `wbar`; key `(a, b)` multiplies `w^a wbar^b`.
#[derive(Clone, Debug, Default)]
struct WPoly {
    terms: BTreeMap<(u32, u32), CExpr>,
}

impl WPoly {
    fn add_term(&mut self, a: u32, b: u32, c: CExpr) {
        let e = self
            .terms
            .entry((a, b))
            .or_insert_with(|| (TExpr::zero(), TExpr::zero()));
        e.0 = &e.0 + &c.0;
        e.1 = &e.1 + &c.1;
        if e.0.is_zero() && e.1.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    fn add(&self, o: &WPoly) -> WPoly {
        let mut out = self.clone();
        for (&(a, b), c) in &o.terms {
            out.add_term(a, b, c.clone());
        }
        out
    }

    fn mul(&self, o: &WPoly) -> WPoly {
        let mut out = WPoly::default();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &o.terms {
                out.add_term(a1 + a2, b1 + b2, cmul(c1, c2));
            }
        }
        out
    }

    fn scale(&self, k: f64) -> WPoly {
        WPoly {
            terms: self
                .terms
                .iter()
                .map(|(&key, c)| (key, (c.0.scale(k), c.1.scale(k))))
                .collect(),
        }
    }

    fn dt(&self) -> WPoly {
        let mut out = WPoly::default();
        for (&(a, b), c) in &self.terms {
            out.add_term(a, b, (c.0.dt(), c.1.dt()));
        }
        out
    }

    /// `P(t, w) + conj(P)(t, wbar)` for `P = re + i im`.
    fn bar_pair(re: &[TExpr], im: &[TExpr]) -> WPoly {
        let mut out = WPoly::default();
        let n = re.len().max(im.len());
        for j in 0..n {
            let r = re.get(j).cloned().unwrap_or_else(TExpr::zero);
            let i = im.get(j).cloned().unwrap_or_else(TExpr::zero);
            out.add_term(j as u32, 0, (r.clone(), i.clone()));
            out.add_term(0, j as u32, (r, -i));
        }
        out
    }

    /// Real part after substituting `w = y + i z`, `wbar = y - i z`.
    fn to_real(&self) -> PolyYZ {
        let mut out = PolyYZ::new();
        for (&(a, b), c) in &self.terms {
            for p in 0..=a {
                for q in 0..=b {
                    // C(a,p) C(b,q) y^{a+b-p-q} z^{p+q} i^p (-i)^q
                    let k = binom(a, p) * binom(b, q);
                    let phase = Complex64::i().powu(p) * (-Complex64::i()).powu(q) * k;
                    let re = &c.0.scale(phase.re) - &c.1.scale(phase.im);
                    out.add_term(a + b - p - q, p + q, re);
                }
            }
        }
        out
    }
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn mu_syms(table: &mut ParamTable, name: &str, p: &MuPoly) -> Vec<TExpr> {
    p.iter()
        .enumerate()
        .map(|(j, f)| register(table, &format!("{name}_{j}"), f))
        .collect()
}

/// Solver and formula mode coincide here: the construction is the closed form.
pub fn build_kz3_harmonic(p: &Harmonic, mode: Mode) -> Result<XPolySolution, FamilyError> {
    if !(p.w1.re.is_finite() && p.w1.im.is_finite()) {
        return Err(FamilyError::Invalid(format!("w1 must be finite, got {}", p.w1)));
    }
    let mut table = ParamTable::new();
    let sigma = mu_syms(&mut table, "sigma", &p.sigma);
    let rho = mu_syms(&mut table, "rho", &p.rho);
    let kappa = mu_syms(&mut table, "kappa", &p.kappa);
    let omega = mu_syms(&mut table, "omega", &p.omega);

    let g = WPoly::bar_pair(&sigma, &rho);
    let h = g.dt().scale(0.5).add(&g.mul(&g).scale(0.25));
    let w1 = p.w1;
    let w1b = w1.conj();
    let mut f = WPoly::default();
    for (&(a, b), c) in &h.terms {
        let c = (c.0.scale(1.0 / ((a + 1) * (b + 1)) as f64), c.1.scale(1.0 / ((a + 1) * (b + 1)) as f64));
        let wa = w1.powu(a + 1);
        let wb = w1b.powu(b + 1);
        f.add_term(a + 1, b + 1, c.clone());
        f.add_term(a + 1, 0, cscale(&c, -wb));
        f.add_term(0, b + 1, cscale(&c, -wa));
        f.add_term(0, 0, cscale(&c, wa * wb));
    }
    let f = f.add(&WPoly::bar_pair(&kappa, &omega));
    Ok(XPolySolution::new(
        Family::Kz3dHarmonic,
        Equation::Kz3d,
        mode,
        table,
        vec![
            Coeff::PolyYZ(f.to_real()),
            Coeff::PolyYZ(g.to_real()),
            Coeff::Zero,
        ],
        None,
    ))
}
