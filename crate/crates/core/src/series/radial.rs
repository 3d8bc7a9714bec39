//! Laurent sums in a radial variable `s = scale*y + shift(t)`, with optional
//! powers of `ln|s|`.

use std::collections::BTreeMap;

use super::{SeriesError, ZeroTest};
use crate::jet::{Coord, Jet, JetError, OrderBox};
use crate::texpr::{ParamJets, TExpr};

/// `sum c(t) * s^power * ln|s|^logdeg` with `s = scale*y + shift(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialField {
    scale: f64,
    shift: TExpr,
    terms: BTreeMap<(i32, u8), TExpr>,
}

impl RadialField {
    pub fn new(scale: f64, shift: TExpr) -> Result<RadialField, SeriesError> {
        if scale == 0.0 || !scale.is_finite() {
            return Err(SeriesError::DegenerateScale(scale));
        }
        Ok(RadialField {
            scale,
            shift,
            terms: BTreeMap::new(),
        })
    }

    /// A field with the same frame and no terms.
    pub fn empty_like(&self) -> RadialField {
        RadialField {
            scale: self.scale,
            shift: self.shift.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn shift(&self) -> &TExpr {
        &self.shift
    }

    pub fn with_term(mut self, power: i32, logdeg: u8, c: TExpr) -> RadialField {
        self.add_term(power, logdeg, c);
        self
    }

    pub fn add_term(&mut self, power: i32, logdeg: u8, c: TExpr) {
        let key = (power, logdeg);
        let sum = match self.terms.remove(&key) {
            Some(old) => &old + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(key, sum);
        }
    }

    pub fn coeff(&self, power: i32, logdeg: u8) -> TExpr {
        self.terms.get(&(power, logdeg)).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i32, u8), &TExpr)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_logdeg(&self) -> u8 {
        self.terms.keys().map(|k| k.1).max().unwrap_or(0)
    }

    pub fn min_power(&self) -> Option<i32> {
        self.terms.keys().map(|k| k.0).min()
    }

    /// Whether evaluation needs `s != 0`.
    pub fn is_singular(&self) -> bool {
        self.terms.keys().any(|&(p, l)| p < 0 || l > 0)
    }

    fn check_frame(&self, other: &RadialField) -> Result<(), SeriesError> {
        if self.scale != other.scale || self.shift != other.shift {
            return Err(SeriesError::FrameMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &RadialField) -> Result<RadialField, SeriesError> {
        self.check_frame(other)?;
        let mut out = self.clone();
        for (&(p, l), c) in &other.terms {
            out.add_term(p, l, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &RadialField) -> Result<RadialField, SeriesError> {
        self.add(&other.scale_by(-1.0))
    }

    pub fn mul(&self, other: &RadialField) -> Result<RadialField, SeriesError> {
        self.check_frame(other)?;
        let mut out = self.empty_like();
        for (&(p, l), c) in &self.terms {
            for (&(q, m), d) in &other.terms {
                out.add_term(p + q, l + m, c * d);
            }
        }
        Ok(out)
    }

    pub fn scale_by(&self, k: f64) -> RadialField {
        let mut out = self.empty_like();
        for (&(p, l), c) in &self.terms {
            out.add_term(p, l, c.scale(k));
        }
        out
    }

    pub fn mul_texpr(&self, k: &TExpr) -> RadialField {
        let mut out = self.empty_like();
        for (&(p, l), c) in &self.terms {
            out.add_term(p, l, c * k);
        }
        out
    }

    /// `d/ds`.
    pub fn ds(&self) -> RadialField {
        let mut out = self.empty_like();
        for (&(p, l), c) in &self.terms {
            if p != 0 {
                out.add_term(p - 1, l, c.scale(p as f64));
            }
            if l > 0 {
                out.add_term(p - 1, l - 1, c.scale(l as f64));
            }
        }
        out
    }

    /// `d/dy = scale * d/ds`.
    pub fn dy(&self) -> RadialField {
        self.ds().scale_by(self.scale)
    }

    /// Total `t`-derivative at fixed `y`: coefficient derivatives plus
    /// `shift' * d/ds`.
    pub fn dt(&self) -> RadialField {
        let mut out = self.ds().mul_texpr(&self.shift.dt());
        for (&(p, l), c) in &self.terms {
            out.add_term(p, l, c.dt());
        }
        out
    }

    /// `s` itself as a field.
    pub fn s(&self) -> RadialField {
        self.empty_like().with_term(1, 0, TExpr::constant(1.0))
    }

    /// `y = (s - shift)/scale` as a field.
    pub fn y(&self) -> RadialField {
        self.empty_like()
            .with_term(1, 0, TExpr::constant(1.0 / self.scale))
            .with_term(0, 0, self.shift.scale(-1.0 / self.scale))
    }

    pub fn max_atom_order(&self) -> u8 {
        self.terms
            .values()
            .chain(std::iter::once(&self.shift))
            .filter_map(TExpr::max_atom_order)
            .max()
            .unwrap_or(0)
    }

    /// The jet of `s` at `(t, y)`.
    pub fn s_jet(&self, jets: &ParamJets, y: f64, orders: OrderBox) -> Jet {
        let sh = Jet::from_univariate(Coord::T, &self.shift.eval(jets), orders);
        &Jet::lift(y, Coord::Y, orders).scale(self.scale) + &sh
    }

    pub fn s_value(&self, jets: &ParamJets, y: f64) -> f64 {
        self.scale * y + self.shift.value(jets)
    }

    /// Evaluates the field as a jet in `(t, y)` at the time `jets` was built
    /// for.
    pub fn eval_jet(&self, jets: &ParamJets, y: f64, orders: OrderBox) -> Result<Jet, JetError> {
        let s = self.s_jet(jets, y, orders);
        self.eval_at_s(jets, &s)
    }

    /// Evaluates with a caller-supplied jet for `s`.
    pub fn eval_at_s(&self, jets: &ParamJets, s: &Jet) -> Result<Jet, JetError> {
        let orders = s.orders();
        let mut out = Jet::zero(orders);
        if self.terms.is_empty() {
            return Ok(out);
        }
        let lo = self.min_power().unwrap_or(0).min(0);
        let hi = self.terms.keys().map(|k| k.0).max().unwrap_or(0).max(0);
        let mut pos = vec![Jet::constant(1.0, orders)];
        for _ in 0..hi {
            let next = pos.last().unwrap() * s;
            pos.push(next);
        }
        let mut neg = Vec::new();
        if lo < 0 {
            let r = s.recip()?;
            neg.push(r.clone());
            for _ in 1..(-lo) {
                let next = neg.last().unwrap() * &r;
                neg.push(next);
            }
        }
        let maxl = self.max_logdeg();
        let mut logs = vec![Jet::constant(1.0, orders)];
        if maxl > 0 {
            let l = s.ln_abs()?;
            for _ in 0..maxl {
                let next = logs.last().unwrap() * &l;
                logs.push(next);
            }
        }
        for (&(p, l), c) in &self.terms {
            let cj = Jet::from_univariate(Coord::T, &c.eval(jets), orders);
            let sp = if p >= 0 {
                &pos[p as usize]
            } else {
                &neg[(-p - 1) as usize]
            };
            let mut term = &cj * sp;
            if l > 0 {
                term = &term * &logs[l as usize];
            }
            out = &out + &term;
        }
        Ok(out)
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(&(p, l), c)| {
                let mut f = format!("({})", c.render(names));
                if p != 0 {
                    f.push_str(&format!("*s^{p}"));
                }
                if l == 1 {
                    f.push_str("*ln|s|");
                } else if l > 1 {
                    f.push_str(&format!("*ln|s|^{l}"));
                }
                f
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Powers `p` with `p(p-1) = c`.
pub fn resonant_powers(c: f64) -> Vec<i32> {
    let mut out = Vec::new();
    let disc = 1.0 + 4.0 * c;
    if disc < 0.0 {
        return out;
    }
    let r = disc.sqrt();
    for cand in [(1.0 - r) / 2.0, (1.0 + r) / 2.0] {
        let p = cand.round();
        if (p * (p - 1.0) - c).abs() < 1e-12 && !out.contains(&(p as i32)) {
            out.push(p as i32);
        }
    }
    out
}

/// Solves `w_yy - (scale^2 c / s^2) w = rhs`, i.e. `w_ss - (c/s^2) w = rhs/scale^2`,
/// termwise in powers of `s`. Resonant homogeneous coefficients come from
/// `free`; for `c = 0` the forcing at `s^-1` and `s^-2` produces logarithms,
/// and a constant forcing is integrated as `y^2/2` times itself.
pub fn solve_radial(
    c: f64,
    rhs: &RadialField,
    free: &BTreeMap<i32, TExpr>,
    zero: &ZeroTest,
) -> Result<RadialField, SeriesError> {
    if rhs.max_logdeg() > 0 {
        return Err(SeriesError::LogForcing);
    }
    let res = resonant_powers(c);
    for p in free.keys() {
        if !res.contains(p) {
            return Err(SeriesError::NotResonant { power: *p, c });
        }
    }
    let lam2 = rhs.scale * rhs.scale;
    let mut w = rhs.empty_like();
    for (p, f) in free {
        w.add_term(*p, 0, f.clone());
    }
    for (&(i, _), r) in &rhs.terms {
        let mult = ((i + 2) * (i + 1)) as f64 - c;
        if mult == 0.0 {
            if c == 0.0 {
                let k = r.scale(1.0 / lam2);
                if i == -1 {
                    // s (ln|s| - 1)
                    w.add_term(1, 1, k.clone());
                    w.add_term(1, 0, -&k);
                } else {
                    w.add_term(0, 1, -&k);
                }
                continue;
            }
            if zero.is_zero(r) {
                continue;
            }
            return Err(SeriesError::Resonance {
                index: i,
                coeff: r.clone(),
            });
        }
        if c == 0.0 && i == 0 {
            // r * y^2 / 2 with y = (s - shift)/scale
            let y = rhs.y();
            let y2 = y.mul(&y)?;
            w = w.add(&y2.mul_texpr(&r.scale(0.5)))?;
            continue;
        }
        w.add_term(i + 2, 0, r.scale(1.0 / (lam2 * mult)));
    }
    Ok(w)
}

/// Solves `w_yy = rhs` with homogeneous part `theta + vartheta * y`.
pub fn double_integrate(
    rhs: &RadialField,
    theta: &TExpr,
    vartheta: &TExpr,
) -> Result<RadialField, SeriesError> {
    let lam = rhs.scale;
    let mut free = BTreeMap::new();
    // theta + vartheta*(s - shift)/scale
    let c0 = theta - &(vartheta * &rhs.shift).scale(1.0 / lam);
    let c1 = vartheta.scale(1.0 / lam);
    if !c0.is_zero() {
        free.insert(0, c0);
    }
    if !c1.is_zero() {
        free.insert(1, c1);
    }
    solve_radial(0.0, rhs, &free, &ZeroTest::structural())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paramdsl::ParamFn;
    use crate::texpr::ParamTable;

    fn one() -> TExpr {
        TExpr::constant(1.0)
    }

    #[test]
    fn resonances() {
        assert_eq!(resonant_powers(6.0), vec![-2, 3]);
        assert_eq!(resonant_powers(2.0), vec![-1, 2]);
        assert_eq!(resonant_powers(0.0), vec![0, 1]);
        assert_eq!(resonant_powers(12.0), vec![-3, 4]);
        assert!(resonant_powers(5.0).is_empty());
    }

    #[test]
    fn kz2_g_coefficient() {
        // w_yy - 6w/s^2 = -8 beta' s^-3 with s = y + beta
        let beta = TExpr::param(0);
        let rhs = RadialField::new(1.0, beta.clone())
            .unwrap()
            .with_term(-3, 0, TExpr::atom(0, 1).scale(-8.0));
        let w = solve_radial(6.0, &rhs, &BTreeMap::new(), &ZeroTest::structural()).unwrap();
        assert_eq!(w.coeff(-1, 0), TExpr::atom(0, 1).scale(2.0));
    }

    #[test]
    fn shortwave_h_coefficients() {
        // raw forcing 12 beta' s^-3 + 6(2-k) s^-2 with scale sqrt 6, k = 1/2
        let k = 0.5;
        let beta = TExpr::param(0);
        let rhs = RadialField::new(6f64.sqrt(), beta)
            .unwrap()
            .with_term(-3, 0, TExpr::atom(0, 1).scale(12.0))
            .with_term(-2, 0, TExpr::constant(6.0 * (2.0 - k)));
        let free = BTreeMap::from([(-2, TExpr::param(1)), (3, TExpr::param(2))]);
        let w = solve_radial(6.0, &rhs, &free, &ZeroTest::structural()).unwrap();
        let d = &w.coeff(-1, 0) - &TExpr::atom(0, 1).scale(-0.5);
        assert!(d.max_coeff() < 1e-15);
        let c0 = w.coeff(0, 0).as_constant().unwrap();
        assert!((c0 - (k - 2.0) / 6.0).abs() < 1e-15);
        assert_eq!(w.coeff(-2, 0), TExpr::param(1));
        assert_eq!(w.coeff(3, 0), TExpr::param(2));
    }

    #[test]
    fn homogeneous_c2() {
        let rhs = RadialField::new(1.0, TExpr::zero()).unwrap();
        let free = BTreeMap::from([(-1, TExpr::param(0)), (2, TExpr::param(1))]);
        let w = solve_radial(2.0, &rhs, &free, &ZeroTest::structural()).unwrap();
        assert_eq!(w.terms().count(), 2);
        assert_eq!(w.coeff(-1, 0), TExpr::param(0));
        assert_eq!(w.coeff(2, 0), TExpr::param(1));
    }

    #[test]
    fn resonance_violation_reports_index() {
        let rhs = RadialField::new(1.0, TExpr::zero())
            .unwrap()
            .with_term(0, 0, TExpr::constant(3.0));
        // c = 2: index 0 is resonant ((0+2)(0+1) = 2)
        match solve_radial(2.0, &rhs, &BTreeMap::new(), &ZeroTest::structural()) {
            Err(SeriesError::Resonance { index, coeff }) => {
                assert_eq!(index, 0);
                assert_eq!(coeff.as_constant(), Some(3.0));
            }
            other => panic!("{other:?}"),
        }
        let bad_free = BTreeMap::from([(1, one())]);
        assert!(matches!(
            solve_radial(2.0, &rhs, &bad_free, &ZeroTest::structural()),
            Err(SeriesError::NotResonant { .. })
        ));
    }

    #[test]
    fn double_integration_examples() {
        let lam = 6f64.sqrt();
        let empty = RadialField::new(lam, TExpr::param(0)).unwrap();
        let w = double_integrate(&empty, &TExpr::param(1), &TExpr::param(2)).unwrap();
        // theta + vartheta*y written in s
        assert_eq!(w, empty.y().mul_texpr(&TExpr::param(2)).add(&empty.empty_like().with_term(0, 0, TExpr::param(1))).unwrap());

        let rhs = empty.empty_like().with_term(-1, 0, one());
        let w = double_integrate(&rhs, &TExpr::zero(), &TExpr::zero()).unwrap();
        assert!((w.coeff(1, 1).as_constant().unwrap() - 1.0 / 6.0).abs() < 1e-16);
        assert!((w.coeff(1, 0).as_constant().unwrap() + 1.0 / 6.0).abs() < 1e-16);

        let rhs = empty.empty_like().with_term(2, 0, one());
        let w = double_integrate(&rhs, &TExpr::zero(), &TExpr::zero()).unwrap();
        assert!((w.coeff(4, 0).as_constant().unwrap() - 1.0 / 72.0).abs() < 1e-17);
    }

    #[test]
    fn formal_residual_vanishes() {
        // w_yy - (lam^2 c/s^2) w - rhs evaluated by jets at random points
        let mut tab = ParamTable::new();
        tab.insert_fn("beta", ParamFn::parse("sin(t) + 0.3*t^2").unwrap());
        tab.insert_fn("a", ParamFn::parse("exp(t/2)").unwrap());
        let lam = 6f64.sqrt();
        let beta = TExpr::param(0);
        let a = TExpr::param(1);
        let rhs = RadialField::new(lam, beta)
            .unwrap()
            .with_term(-4, 0, a.clone())
            .with_term(-2, 0, &a * &a)
            .with_term(-1, 0, TExpr::atom(0, 1))
            .with_term(0, 0, TExpr::constant(1.5))
            .with_term(3, 0, a.scale(2.0));
        for c in [0.0, 2.0, 12.0] {
            let w = match solve_radial(c, &rhs, &BTreeMap::new(), &ZeroTest::structural()) {
                Ok(w) => w,
                Err(SeriesError::Resonance { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            let orders = OrderBox::new(0, 0, 2, 0);
            for (t, y) in [(0.3, 0.7), (-0.4, 1.9), (1.1, -0.8)] {
                let jets = tab.jets(t, 0, 2).unwrap();
                let wj = w.eval_jet(&jets, y, orders).unwrap();
                let rj = rhs.eval_jet(&jets, y, orders).unwrap();
                let s = w.s_value(&jets, y);
                let wyy = wj.partial([0, 0, 2, 0]).unwrap();
                let lhs = wyy - lam * lam * c / (s * s) * wj.value();
                let scale = wyy.abs().max(rj.value().abs()).max(1.0);
                assert!((lhs - rj.value()).abs() < 1e-12 * scale, "c={c}: {lhs} vs {}", rj.value());
            }
        }
    }
}
