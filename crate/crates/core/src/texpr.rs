//! Symbolic coefficients in `t`: real polynomials in named parameter
//! functions and their derivatives, closed under `+`, `*` and `d/dt`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::families::AlphaFn;
use crate::jet::univariate_mul;
use crate::paramdsl::{EvalError, ParamFn};

/// The `order`-th derivative of parameter `param`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub param: u16,
    pub order: u8,
}

/// Sorted product of atoms; repeated atoms encode powers.
pub type Monomial = Vec<Atom>;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TExpr {
    terms: BTreeMap<Monomial, f64>,
}

fn accumulate(terms: &mut BTreeMap<Monomial, f64>, m: Monomial, c: f64) {
    if c == 0.0 {
        return;
    }
    match terms.get_mut(&m) {
        Some(old) => {
            let sum = *old + c;
            // sums that cancel to rounding level are exact zeros in disguise
            if sum.abs() <= 4.0 * f64::EPSILON * (old.abs() + c.abs()) {
                terms.remove(&m);
            } else {
                *old = sum;
            }
        }
        None => {
            terms.insert(m, c);
        }
    }
}

impl TExpr {
    pub fn zero() -> TExpr {
        TExpr::default()
    }

    pub fn constant(c: f64) -> TExpr {
        let mut terms = BTreeMap::new();
        accumulate(&mut terms, Vec::new(), c);
        TExpr { terms }
    }

    pub fn param(id: u16) -> TExpr {
        Self::atom(id, 0)
    }

    pub fn atom(param: u16, order: u8) -> TExpr {
        let mut terms = BTreeMap::new();
        terms.insert(vec![Atom { param, order }], 1.0);
        TExpr { terms }
    }

    pub fn from_terms(iter: impl IntoIterator<Item = (Monomial, f64)>) -> TExpr {
        let mut terms = BTreeMap::new();
        for (mut m, c) in iter {
            m.sort();
            accumulate(&mut terms, m, c);
        }
        TExpr { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if no parameter occurs.
    pub fn as_constant(&self) -> Option<f64> {
        match self.terms.len() {
            0 => Some(0.0),
            1 => self.terms.get(&Vec::new()).copied(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, s: f64) -> TExpr {
        if s == 0.0 {
            return TExpr::zero();
        }
        TExpr {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> TExpr {
        let mut acc = TExpr::constant(1.0);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Total derivative in `t`.
    pub fn dt(&self) -> TExpr {
        let mut terms = BTreeMap::new();
        for (m, &c) in &self.terms {
            for i in 0..m.len() {
                if i > 0 && m[i] == m[i - 1] {
                    continue;
                }
                let mult = m.iter().filter(|a| **a == m[i]).count() as f64;
                let mut dm = m.clone();
                dm.remove(i);
                dm.push(Atom {
                    param: m[i].param,
                    order: m[i].order + 1,
                });
                dm.sort();
                accumulate(&mut terms, dm, c * mult);
            }
        }
        TExpr { terms }
    }

    /// Highest derivative order of any atom, or `None` for constants.
    pub fn max_atom_order(&self) -> Option<u8> {
        self.terms
            .keys()
            .flat_map(|m| m.iter().map(|a| a.order))
            .max()
    }

    pub fn uses_param(&self, id: u16) -> bool {
        self.terms.keys().any(|m| m.iter().any(|a| a.param == id))
    }

    /// Largest absolute coefficient.
    pub fn max_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Derivatives in `t` up to `jets.order()` at the point `jets` was
    /// built for.
    pub fn eval(&self, jets: &ParamJets) -> Vec<f64> {
        let n = jets.order + 1;
        let mut out = vec![0.0; n];
        for (m, &c) in &self.terms {
            let mut acc: Option<Vec<f64>> = None;
            for a in m {
                let aj = jets.atom(*a);
                acc = Some(match acc {
                    None => aj.to_vec(),
                    Some(prev) => univariate_mul(&prev, aj),
                });
            }
            match acc {
                None => out[0] += c,
                Some(v) => {
                    for (o, x) in out.iter_mut().zip(v) {
                        *o += c * x;
                    }
                }
            }
        }
        out
    }

    pub fn value(&self, jets: &ParamJets) -> f64 {
        let mut out = 0.0;
        for (m, &c) in &self.terms {
            out += c * m.iter().map(|a| jets.atom(*a)[0]).product::<f64>();
        }
        out
    }

    /// Sum of absolute term values at the point, used as a scale for
    /// cancellation tests.
    pub fn magnitude(&self, jets: &ParamJets) -> f64 {
        let mut out = 0.0;
        for (m, &c) in &self.terms {
            out += (c * m.iter().map(|a| jets.atom(*a)[0]).product::<f64>()).abs();
        }
        out
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (m, &c)) in self.terms.iter().enumerate() {
            let (sign, mag) = if c < 0.0 { ("-", -c) } else { ("+", c) };
            if k == 0 {
                if sign == "-" {
                    s.push('-');
                }
            } else {
                let _ = write!(s, " {sign} ");
            }
            let mut factors = Vec::new();
            if mag != 1.0 || m.is_empty() {
                factors.push(format!("{mag:?}"));
            }
            let mut i = 0;
            while i < m.len() {
                let mut j = i;
                while j < m.len() && m[j] == m[i] {
                    j += 1;
                }
                let name = names
                    .get(m[i].param as usize)
                    .map(String::as_str)
                    .unwrap_or("?");
                let mut f = format!("{name}{}", "'".repeat(m[i].order as usize));
                if j - i > 1 {
                    let _ = write!(f, "^{}", j - i);
                }
                factors.push(f);
                i = j;
            }
            s.push_str(&factors.join("*"));
        }
        s
    }

    pub fn to_records(&self, names: &[String]) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|(m, &c)| TermRecord {
                coeff: c,
                factors: m
                    .iter()
                    .map(|a| (names[a.param as usize].clone(), a.order))
                    .collect(),
            })
            .collect()
    }

    pub fn from_records(records: &[TermRecord], names: &[String]) -> Result<TExpr, String> {
        let mut terms = Vec::new();
        for r in records {
            let mut m = Vec::new();
            for (name, order) in &r.factors {
                let id = names
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| format!("unknown parameter `{name}` in term list"))?;
                m.push(Atom {
                    param: id as u16,
                    order: *order,
                });
            }
            terms.push((m, r.coeff));
        }
        Ok(TExpr::from_terms(terms))
    }
}

/// Serialized monomial: coefficient times a product of `(name, order)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub coeff: f64,
    pub factors: Vec<(String, u8)>,
}

impl Add for &TExpr {
    type Output = TExpr;
    fn add(self, rhs: &TExpr) -> TExpr {
        let mut terms = self.terms.clone();
        for (m, &c) in &rhs.terms {
            accumulate(&mut terms, m.clone(), c);
        }
        TExpr { terms }
    }
}

impl Sub for &TExpr {
    type Output = TExpr;
    fn sub(self, rhs: &TExpr) -> TExpr {
        let mut terms = self.terms.clone();
        for (m, &c) in &rhs.terms {
            accumulate(&mut terms, m.clone(), -c);
        }
        TExpr { terms }
    }
}

impl Mul for &TExpr {
    type Output = TExpr;
    fn mul(self, rhs: &TExpr) -> TExpr {
        let mut terms = BTreeMap::new();
        for (a, &ca) in &self.terms {
            for (b, &cb) in &rhs.terms {
                let mut m = Vec::with_capacity(a.len() + b.len());
                m.extend_from_slice(a);
                m.extend_from_slice(b);
                m.sort();
                accumulate(&mut terms, m, ca * cb);
            }
        }
        TExpr { terms }
    }
}

impl Neg for &TExpr {
    type Output = TExpr;
    fn neg(self) -> TExpr {
        self.scale(-1.0)
    }
}

impl Add for TExpr {
    type Output = TExpr;
    fn add(self, rhs: TExpr) -> TExpr {
        &self + &rhs
    }
}

impl Sub for TExpr {
    type Output = TExpr;
    fn sub(self, rhs: TExpr) -> TExpr {
        &self - &rhs
    }
}

impl Mul for TExpr {
    type Output = TExpr;
    fn mul(self, rhs: TExpr) -> TExpr {
        &self * &rhs
    }
}

impl Neg for TExpr {
    type Output = TExpr;
    fn neg(self) -> TExpr {
        self.scale(-1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("parameter `{name}`: {source}")]
    Eval {
        name: String,
        #[source]
        source: EvalError,
    },
    #[error("radicand 6*gamma2' - 5*gamma2^2 = {value} is negative at t = {t}")]
    NegativeRadicand { t: f64, value: f64 },
    #[error(
        "radicand 6*gamma2' - 5*gamma2^2 vanishes at t = {t}; derivatives of alpha beyond the first are singular there"
    )]
    DegenerateRadicand { t: f64 },
}

/// How a named parameter is defined.
#[derive(Debug, Clone)]
pub enum ParamSource {
    Expr(ParamFn),
    Alpha(AlphaFn),
}

impl ParamSource {
    pub fn derivs(&self, name: &str, t: f64, order: usize) -> Result<Vec<f64>, ParamError> {
        match self {
            ParamSource::Expr(f) => f.eval_jet(t, order).map_err(|source| ParamError::Eval {
                name: name.to_string(),
                source,
            }),
            ParamSource::Alpha(a) => a.derivs(t, order),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ParamSource::Expr(f) if f.is_zero())
    }
}

/// Named parameter functions; ids index into the table.
#[derive(Debug, Clone, Default)]
pub struct ParamTable {
    names: Vec<String>,
    sources: Vec<ParamSource>,
}

impl ParamTable {
    pub fn new() -> ParamTable {
        ParamTable::default()
    }

    /// Registers `name`, replacing an earlier definition.
    pub fn insert(&mut self, name: &str, source: ParamSource) -> u16 {
        if let Some(id) = self.id(name) {
            self.sources[id as usize] = source;
            return id;
        }
        self.names.push(name.to_string());
        self.sources.push(source);
        (self.names.len() - 1) as u16
    }

    pub fn insert_fn(&mut self, name: &str, f: ParamFn) -> u16 {
        self.insert(name, ParamSource::Expr(f))
    }

    pub fn id(&self, name: &str) -> Option<u16> {
        self.names.iter().position(|n| n == name).map(|i| i as u16)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn source(&self, id: u16) -> &ParamSource {
        &self.sources[id as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Derivatives of every parameter at `t`; `order` is the t-order wanted
    /// from coefficient evaluation and `extra` the highest atom order used.
    pub fn jets(&self, t: f64, order: usize, extra: usize) -> Result<ParamJets, ParamError> {
        let mut derivs = Vec::with_capacity(self.len());
        for (name, src) in self.names.iter().zip(&self.sources) {
            if src.is_zero() {
                derivs.push(vec![0.0; order + extra + 1]);
            } else {
                derivs.push(src.derivs(name, t, order + extra)?);
            }
        }
        Ok(ParamJets { t, order, derivs })
    }
}

/// Parameter derivatives at one time.
#[derive(Debug, Clone)]
pub struct ParamJets {
    pub t: f64,
    order: usize,
    derivs: Vec<Vec<f64>>,
}

impl ParamJets {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Derivatives of the atom in `t` up to `order`.
    pub fn atom(&self, a: Atom) -> &[f64] {
        let d = &self.derivs[a.param as usize];
        let lo = a.order as usize;
        &d[lo..lo + self.order + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(srcs: &[(&str, &str)]) -> ParamTable {
        let mut t = ParamTable::new();
        for (n, s) in srcs {
            t.insert_fn(n, ParamFn::parse(s).unwrap());
        }
        t
    }

    #[test]
    fn dt_is_a_derivation() {
        let a = TExpr::param(0);
        let b = TExpr::param(1);
        let p = &(&a * &a) * &b;
        // (a^2 b)' = 2 a a' b + a^2 b'
        let expect = &(&(&a * &TExpr::atom(0, 1)) * &b).scale(2.0) + &(&(&a * &a) * &TExpr::atom(1, 1));
        assert_eq!(p.dt(), expect);
        assert!(TExpr::constant(3.0).dt().is_zero());
    }

    #[test]
    fn evaluation_matches_calculus() {
        let tab = table(&[("a", "sin(t)"), ("b", "t^2")]);
        let a = TExpr::param(0);
        let b = TExpr::param(1);
        let e = &(&a * &b) + &TExpr::atom(1, 1).scale(3.0);
        let j = tab.jets(0.7, 2, 2).unwrap();
        let v = e.eval(&j);
        let t: f64 = 0.7;
        let f = |t: f64| t.sin() * t * t + 6.0 * t;
        let d1 = t.cos() * t * t + 2.0 * t * t.sin() + 6.0;
        assert!((v[0] - f(t)).abs() < 1e-14);
        assert!((v[1] - d1).abs() < 1e-14);
        let d2 = -t.sin() * t * t + 4.0 * t * t.cos() + 2.0 * t.sin();
        assert!((v[2] - d2).abs() < 1e-13);
        assert!((e.dt().eval(&j)[0] - d1).abs() < 1e-14);
    }

    #[test]
    fn cancellation_prunes() {
        let a = TExpr::param(0).scale(0.1 + 0.2);
        let b = TExpr::param(0).scale(0.3);
        assert!((&a - &b).is_zero());
        assert_eq!(TExpr::constant(0.0), TExpr::zero());
    }

    #[test]
    fn render_and_records_round_trip() {
        let names = vec!["alpha".to_string(), "beta".to_string()];
        let e = &(&TExpr::param(0) * &TExpr::param(0)).scale(0.25) - &TExpr::atom(1, 2).scale(2.0);
        assert_eq!(e.render(&names), "0.25*alpha^2 - 2.0*beta''");
        let back = TExpr::from_records(&e.to_records(&names), &names).unwrap();
        assert_eq!(back, e);
    }
}
