//! Polynomials in the frame coordinate `eta` and Laurent sums in `zeta` with
//! such polynomials as coefficients.

use std::collections::BTreeMap;

use super::{SeriesError, ZeroTest};
use crate::jet::{Coord, Jet};
use crate::texpr::{ParamJets, TExpr};

/// `sum_j c_j(t) eta^j`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EtaPoly {
    coeffs: Vec<TExpr>,
}

impl EtaPoly {
    pub fn zero() -> EtaPoly {
        EtaPoly::default()
    }

    pub fn from_coeffs(coeffs: Vec<TExpr>) -> EtaPoly {
        let mut p = EtaPoly { coeffs };
        p.trim();
        p
    }

    pub fn constant(c: TExpr) -> EtaPoly {
        Self::from_coeffs(vec![c])
    }

    /// `eta` itself.
    pub fn eta() -> EtaPoly {
        Self::from_coeffs(vec![TExpr::zero(), TExpr::constant(1.0)])
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(TExpr::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[TExpr] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> TExpr {
        self.coeffs.get(j).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, other: &EtaPoly) -> EtaPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs((0..n).map(|j| &self.coeff(j) + &other.coeff(j)).collect())
    }

    pub fn sub(&self, other: &EtaPoly) -> EtaPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs((0..n).map(|j| &self.coeff(j) - &other.coeff(j)).collect())
    }

    pub fn mul(&self, other: &EtaPoly) -> EtaPoly {
        if self.is_zero() || other.is_zero() {
            return EtaPoly::zero();
        }
        let mut out = vec![TExpr::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Self::from_coeffs(out)
    }

    pub fn scale(&self, k: f64) -> EtaPoly {
        Self::from_coeffs(self.coeffs.iter().map(|c| c.scale(k)).collect())
    }

    pub fn mul_texpr(&self, k: &TExpr) -> EtaPoly {
        Self::from_coeffs(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn d_eta(&self) -> EtaPoly {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| c.scale(j as f64))
                .collect(),
        )
    }

    /// Derivative of the coefficients only.
    pub fn dt_explicit(&self) -> EtaPoly {
        Self::from_coeffs(self.coeffs.iter().map(TExpr::dt).collect())
    }

    pub fn max_atom_order(&self) -> u8 {
        self.coeffs
            .iter()
            .filter_map(TExpr::max_atom_order)
            .max()
            .unwrap_or(0)
    }

    pub fn eval_jet(&self, jets: &ParamJets, eta: &Jet) -> Jet {
        let orders = eta.orders();
        let mut out = Jet::zero(orders);
        for c in self.coeffs.iter().rev() {
            let cj = Jet::from_univariate(Coord::T, &c.eval(jets), orders);
            out = &(&out * eta) + &cj;
        }
        out
    }

    pub fn value(&self, jets: &ParamJets, eta: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * eta + c.value(jets))
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| match j {
                0 => format!("({})", c.render(names)),
                1 => format!("({})*eta", c.render(names)),
                _ => format!("({})*eta^{j}", c.render(names)),
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// `sum_i c_i(t, eta) zeta^i`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BiField {
    terms: BTreeMap<i32, EtaPoly>,
}

impl BiField {
    pub fn zero() -> BiField {
        BiField::default()
    }

    pub fn term(power: i32, c: EtaPoly) -> BiField {
        let mut f = BiField::zero();
        f.add_term(power, c);
        f
    }

    /// `zeta` itself.
    pub fn zeta() -> BiField {
        Self::term(1, EtaPoly::constant(TExpr::constant(1.0)))
    }

    /// `eta` itself.
    pub fn eta() -> BiField {
        Self::term(0, EtaPoly::eta())
    }

    pub fn add_term(&mut self, power: i32, c: EtaPoly) {
        let sum = match self.terms.remove(&power) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(power, sum);
        }
    }

    pub fn coeff(&self, power: i32) -> EtaPoly {
        self.terms.get(&power).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &EtaPoly)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_power(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn max_power(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    pub fn is_singular(&self) -> bool {
        self.min_power().is_some_and(|p| p < 0)
    }

    pub fn add(&self, other: &BiField) -> BiField {
        let mut out = self.clone();
        for (&p, c) in &other.terms {
            out.add_term(p, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &BiField) -> BiField {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &BiField) -> BiField {
        let mut out = BiField::zero();
        for (&p, a) in &self.terms {
            for (&q, b) in &other.terms {
                out.add_term(p + q, a.mul(b));
            }
        }
        out
    }

    pub fn scale(&self, k: f64) -> BiField {
        self.map(|c| c.scale(k))
    }

    pub fn mul_eta_poly(&self, k: &EtaPoly) -> BiField {
        self.map(|c| c.mul(k))
    }

    fn map(&self, f: impl Fn(&EtaPoly) -> EtaPoly) -> BiField {
        let mut out = BiField::zero();
        for (&p, c) in &self.terms {
            out.add_term(p, f(c));
        }
        out
    }

    pub fn d_zeta(&self) -> BiField {
        let mut out = BiField::zero();
        for (&p, c) in &self.terms {
            if p != 0 {
                out.add_term(p - 1, c.scale(p as f64));
            }
        }
        out
    }

    pub fn d_eta(&self) -> BiField {
        self.map(EtaPoly::d_eta)
    }

    pub fn dt_explicit(&self) -> BiField {
        self.map(EtaPoly::dt_explicit)
    }

    pub fn max_atom_order(&self) -> u8 {
        self.terms
            .values()
            .map(EtaPoly::max_atom_order)
            .max()
            .unwrap_or(0)
    }

    /// Evaluation with caller-supplied jets for `zeta` and `eta`.
    pub fn eval_jet(&self, jets: &ParamJets, zeta: &Jet, eta: &Jet) -> Result<Jet, crate::jet::JetError> {
        let orders = zeta.orders();
        let mut out = Jet::zero(orders);
        if self.terms.is_empty() {
            return Ok(out);
        }
        let lo = self.min_power().unwrap().min(0);
        let inv = if lo < 0 { Some(zeta.recip()?) } else { None };
        for (&p, c) in &self.terms {
            let zp = if p >= 0 {
                zeta.powi(p)?
            } else {
                inv.as_ref().unwrap().powi(-p)?
            };
            out = &out + &(&c.eval_jet(jets, eta) * &zp);
        }
        Ok(out)
    }

    pub fn value(&self, jets: &ParamJets, zeta: f64, eta: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&p, c)| c.value(jets, eta) * zeta.powi(p))
            .sum()
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(&p, c)| {
                if p == 0 {
                    format!("[{}]", c.render(names))
                } else {
                    format!("[{}]*zeta^{p}", c.render(names))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Time derivative in the moving frame `zeta = cos(a) y + sin(a) z + b`,
/// `eta = -sin(a) y + cos(a) z`:
/// `D_t = d_t + (a' eta + b') d_zeta + a' (b - zeta) d_eta`.
pub fn total_t_derivative(f: &BiField, alpha: &TExpr, beta: &TExpr) -> BiField {
    let a1 = alpha.dt();
    let b1 = beta.dt();
    let zeta_rate = EtaPoly::from_coeffs(vec![b1, a1.clone()]);
    let eta_rate = BiField::term(0, EtaPoly::constant(&a1 * beta))
        .add(&BiField::term(1, EtaPoly::constant(-&a1)));
    f.dt_explicit()
        .add(&f.d_zeta().mul_eta_poly(&zeta_rate))
        .add(&f.d_eta().mul(&eta_rate))
}

/// `(F(eta + i zeta) + F(eta - i zeta))/2 = sum_k (-1)^k d_eta^{2k} F zeta^{2k}/(2k)!`.
pub fn complex_even_part(f: &EtaPoly) -> BiField {
    let mut out = BiField::zero();
    let mut d = f.clone();
    let mut k = 0;
    let mut fact = 1.0;
    while !d.is_zero() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        out.add_term(2 * k, d.scale(sign / fact));
        d = d.d_eta().d_eta();
        k += 1;
        fact *= ((2 * k - 1) * (2 * k)) as f64;
    }
    out
}

const MAX_SWEEP: usize = 256;

/// Solves `w_zz + w_ee - (c/zeta^2) w = rhs` termwise in `zeta`, i.e.
/// `((i+2)(i+1) - c) w_{i+2} = r_i - d_eta^2 w_i`, sweeping upward from the
/// lowest forced or resonant index. Resonant coefficients come from `free`.
pub fn solve_eta(
    c: f64,
    rhs: &BiField,
    free: &BTreeMap<i32, EtaPoly>,
    zero: &ZeroTest,
) -> Result<BiField, SeriesError> {
    let res = super::radial::resonant_powers(c);
    for p in free.keys() {
        if !res.contains(p) {
            return Err(SeriesError::NotResonant { power: *p, c });
        }
    }
    let lowest_res = res.iter().copied().min().unwrap_or(0);
    let start = rhs
        .min_power()
        .unwrap_or(lowest_res - 2)
        .min(lowest_res - 2);
    let last_forced = rhs
        .max_power()
        .unwrap_or(start)
        .max(free.keys().copied().max().unwrap_or(start));
    let mut w = BiField::zero();
    let mut i = start;
    for _ in 0..MAX_SWEEP {
        let ri = rhs.coeff(i).sub(&w.coeff(i).d_eta().d_eta());
        let mult = ((i + 2) * (i + 1)) as f64 - c;
        if mult == 0.0 {
            for coeff in ri.coeffs() {
                if !zero.is_zero(coeff) {
                    return Err(SeriesError::EtaResonance {
                        index: i,
                        coeff: ri.clone(),
                    });
                }
            }
            if let Some(f) = free.get(&(i + 2)) {
                w.add_term(i + 2, f.clone());
            }
        } else {
            w.add_term(i + 2, ri.scale(1.0 / mult));
        }
        if i >= last_forced && w.coeff(i + 1).is_zero() && w.coeff(i + 2).is_zero() {
            return Ok(w);
        }
        i += 1;
    }
    Err(SeriesError::NonTerminating)
}

/// The `c = 2` case with free data `kappa` at `zeta^-1` and `omega` at
/// `zeta^2`.
pub fn solve_radial_eta(
    rhs: &BiField,
    kappa: &EtaPoly,
    omega: &EtaPoly,
    zero: &ZeroTest,
) -> Result<BiField, SeriesError> {
    let free = BTreeMap::from([(-1, kappa.clone()), (2, omega.clone())]);
    solve_eta(2.0, rhs, &free, zero)
}
