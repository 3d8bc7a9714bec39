//! Solution families of the x-polynomial ansatz `u = sum_m C_m(t, y, z) x^m`.
//!
//! Every builder works in two modes. Solver mode re-derives the coefficient
//! fields with the series engine; formula mode transcribes the closed forms
//! term by term so the two can be compared.

mod alpha;
mod doc;
mod harmonic;
mod kz2;
mod kz3;
mod shortwave;
mod special;
mod sym;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::elliptic::{WpError, WpEvaluator};
use crate::jet::{Coord, Jet, JetError, OrderBox};
use crate::paramdsl::ParamFn;
use crate::series::{BiField, RadialField, SeriesError};
use crate::texpr::{ParamError, ParamJets, ParamTable, TExpr};

pub use alpha::AlphaFn;
pub use doc::{AlphaDoc, BiTermDoc, CoeffDoc, ExprDoc, FrameDoc, ParamDoc, PolyTermDoc, RadialTermDoc, SolutionDoc};
pub use harmonic::{build_kz3_harmonic, Harmonic, MuPoly};
pub use kz2::{build_kz2_blowup, build_kz2_poly, Kz2Blowup, Kz2Poly};
pub use kz3::{build_kz3_blowup, AlphaSpec, Kz3Blowup};
pub use shortwave::{build_sw_blowup, build_sw_poly, SwBlowup, SwPoly};
pub use special::build_elliptic;

/// The governing equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Equation {
    /// `2u_tx - 2(x + u_x)u_xx + u_yy + 2k u_x = 0`
    Shortwave { k: f64 },
    /// `2u_tx + (u u_x)_x - u_yy = 0`
    Kz2d,
    /// `2u_tx + (u u_x)_x - u_yy - u_zz = 0`
    Kz3d,
}

impl Equation {
    pub fn name(&self) -> &'static str {
        match self {
            Equation::Shortwave { .. } => "shortwave",
            Equation::Kz2d => "kz2d",
            Equation::Kz3d => "kz3d",
        }
    }

    pub fn has_z(&self) -> bool {
        matches!(self, Equation::Kz3d)
    }

    /// Number of x-coefficients in the ansatz.
    pub fn n_coeffs(&self) -> usize {
        match self {
            Equation::Shortwave { .. } => 4,
            _ => 3,
        }
    }

    /// Order box used for residual evaluation.
    pub fn residual_box(&self) -> OrderBox {
        OrderBox::new(1, 2, 2, if self.has_z() { 2 } else { 0 })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    ShortwaveBlowup,
    ShortwavePolynomial,
    ShortwaveElliptic,
    Kz2dBlowup,
    Kz2dPolynomial,
    Kz2dElliptic,
    Kz3dBlowup,
    Kz3dHarmonic,
    Kz3dElliptic,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::ShortwaveBlowup,
        Family::ShortwavePolynomial,
        Family::ShortwaveElliptic,
        Family::Kz2dBlowup,
        Family::Kz2dPolynomial,
        Family::Kz2dElliptic,
        Family::Kz3dBlowup,
        Family::Kz3dHarmonic,
        Family::Kz3dElliptic,
    ];

    pub fn equation_name(self) -> &'static str {
        match self {
            Family::ShortwaveBlowup | Family::ShortwavePolynomial | Family::ShortwaveElliptic => {
                "shortwave"
            }
            Family::Kz2dBlowup | Family::Kz2dPolynomial | Family::Kz2dElliptic => "kz2d",
            _ => "kz3d",
        }
    }

    pub fn kind(self) -> &'static str {
        match self {
            Family::ShortwaveBlowup | Family::Kz2dBlowup | Family::Kz3dBlowup => "blowup",
            Family::ShortwavePolynomial | Family::Kz2dPolynomial => "polynomial",
            Family::Kz3dHarmonic => "harmonic",
            _ => "elliptic",
        }
    }

    pub fn name(self) -> String {
        format!("{}-{}", self.equation_name(), self.kind())
    }

    pub fn lookup(equation: &str, kind: &str) -> Option<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.equation_name() == equation && f.kind() == kind)
    }

    pub fn from_name(name: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.name() == name)
    }

    /// Parameters the caller must supply: the integration constants.
    pub fn required_params(self) -> &'static [&'static str] {
        match self {
            Family::ShortwaveBlowup => &["rho", "theta", "vartheta"],
            Family::ShortwavePolynomial => &["rho", "tau"],
            Family::Kz2dBlowup => &["rho"],
            Family::Kz3dBlowup => &["kappa", "omega"],
            Family::Kz3dHarmonic => &["kappa", "omega"],
            _ => &[],
        }
    }

    /// Parameters that default to zero.
    pub fn optional_params(self) -> &'static [&'static str] {
        match self {
            Family::ShortwaveBlowup => &["alpha", "beta", "gamma", "sigma"],
            Family::ShortwavePolynomial => &["alpha", "beta", "gamma", "sigma"],
            Family::Kz2dBlowup => &["alpha", "beta", "gamma", "sigma"],
            Family::Kz2dPolynomial => &["alpha", "beta", "gamma", "sigma"],
            Family::Kz3dBlowup => &["gamma0", "gamma1", "gamma2", "beta", "sigma", "alpha"],
            Family::Kz3dHarmonic => &["sigma", "rho"],
            _ => &[],
        }
    }

    /// Constants the caller must supply.
    pub fn required_constants(self) -> &'static [&'static str] {
        match self {
            Family::Kz3dHarmonic => &["w1_re", "w1_im"],
            Family::ShortwaveElliptic | Family::Kz2dElliptic => &["iota"],
            Family::Kz3dElliptic => &["iota", "a", "b"],
            _ => &[],
        }
    }

    pub fn optional_constants(self) -> &'static [&'static str] {
        match self {
            Family::Kz3dBlowup => &["epsilon", "alpha0", "t0"],
            _ => &[],
        }
    }

    pub fn has_formula(self) -> bool {
        matches!(
            self,
            Family::ShortwaveBlowup
                | Family::ShortwavePolynomial
                | Family::Kz2dBlowup
                | Family::Kz2dPolynomial
                | Family::Kz3dBlowup
        )
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Solver,
    Formula,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Solver => "solver",
            Mode::Formula => "formula",
        }
    }

    pub fn from_name(s: &str) -> Option<Mode> {
        match s {
            "solver" => Some(Mode::Solver),
            "formula" => Some(Mode::Formula),
            _ => None,
        }
    }
}

/// Real polynomial in `(y, z)` with time-dependent coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PolyYZ {
    terms: BTreeMap<(u32, u32), TExpr>,
}

impl PolyYZ {
    pub fn new() -> PolyYZ {
        PolyYZ::default()
    }

    pub fn add_term(&mut self, py: u32, pz: u32, c: TExpr) {
        let key = (py, pz);
        let sum = match self.terms.remove(&key) {
            Some(old) => &old + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(key, sum);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), &TExpr)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn coeff(&self, py: u32, pz: u32) -> TExpr {
        self.terms.get(&(py, pz)).cloned().unwrap_or_else(TExpr::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_atom_order(&self) -> u8 {
        self.terms
            .values()
            .filter_map(TExpr::max_atom_order)
            .max()
            .unwrap_or(0)
    }

    fn eval_jet(&self, jets: &ParamJets, y: &Jet, z: &Jet) -> Jet {
        let orders = y.orders();
        let mut out = Jet::zero(orders);
        let my = self.terms.keys().map(|k| k.0).max().unwrap_or(0);
        let mz = self.terms.keys().map(|k| k.1).max().unwrap_or(0);
        let powers = |v: &Jet, n: u32| {
            let mut p = vec![Jet::constant(1.0, orders)];
            for _ in 0..n {
                let next = p.last().unwrap() * v;
                p.push(next);
            }
            p
        };
        let yp = powers(y, my);
        let zp = powers(z, mz);
        for (&(a, b), c) in &self.terms {
            let cj = Jet::from_univariate(Coord::T, &c.eval(jets), orders);
            out = &out + &(&cj * &(&yp[a as usize] * &zp[b as usize]));
        }
        out
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(&(a, b), c)| {
                let mut s = format!("({})", c.render(names));
                if a > 0 {
                    s.push_str(&format!("*y^{a}"));
                }
                if b > 0 {
                    s.push_str(&format!("*z^{b}"));
                }
                s
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// `P(a*y + b*z)` for the Weierstrass function with the stored invariant.
#[derive(Clone, Debug)]
pub struct EllipticTerm {
    wp: Arc<WpEvaluator>,
    a: f64,
    b: f64,
}

impl EllipticTerm {
    pub fn new(wp: Arc<WpEvaluator>, a: f64, b: f64) -> EllipticTerm {
        EllipticTerm { wp, a, b }
    }

    pub fn evaluator(&self) -> &WpEvaluator {
        &self.wp
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

/// One x-coefficient field.
#[derive(Clone, Debug)]
pub enum Coeff {
    Zero,
    Radial(RadialField),
    Bi(BiField),
    PolyYZ(PolyYZ),
    Elliptic(EllipticTerm),
}

impl Coeff {
    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Zero => true,
            Coeff::Radial(r) => r.is_zero(),
            Coeff::Bi(b) => b.is_zero(),
            Coeff::PolyYZ(p) => p.is_zero(),
            Coeff::Elliptic(_) => false,
        }
    }

    fn max_atom_order(&self) -> u8 {
        match self {
            Coeff::Radial(r) => r.max_atom_order(),
            Coeff::Bi(b) => b.max_atom_order(),
            Coeff::PolyYZ(p) => p.max_atom_order(),
            _ => 0,
        }
    }

    fn is_singular(&self) -> bool {
        match self {
            Coeff::Radial(r) => r.is_singular(),
            Coeff::Bi(b) => b.is_singular(),
            Coeff::Elliptic(_) => true,
            _ => false,
        }
    }

    pub fn render(&self, names: &[String]) -> String {
        match self {
            Coeff::Zero => "0".into(),
            Coeff::Radial(r) => r.render(names),
            Coeff::Bi(b) => b.render(names),
            Coeff::PolyYZ(p) => p.render(names),
            Coeff::Elliptic(e) => format!("P_{:?}({:?}*y + {:?}*z)", e.wp.iota(), e.a, e.b),
        }
    }
}

/// Moving coordinates of a blow-up family.
#[derive(Clone, Debug, PartialEq)]
pub enum Frame {
    /// `s = scale*y + shift(t)`.
    Line { scale: f64, shift: TExpr },
    /// `zeta = cos(alpha) y + sin(alpha) z + beta`, `eta = -sin(alpha) y + cos(alpha) z`.
    Plane { alpha: TExpr, beta: TExpr },
}

/// Where a solution is singular at a fixed time.
#[derive(Clone, Debug, PartialEq)]
pub enum Surface {
    None,
    /// The line `y = y0`.
    Line { y: f64 },
    /// The plane `normal . (y, z) = offset`, `normal` a unit vector.
    Plane { normal: [f64; 2], offset: f64 },
    /// The family `normal . (y, z) = m * spacing`, `m` integer.
    Lattice { normal: [f64; 2], spacing: f64 },
}

impl fmt::Display for Surface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Surface::None => f.write_str("none"),
            Surface::Line { y } => write!(f, "line y = {y:?}"),
            Surface::Plane { normal, offset } => write!(
                f,
                "plane {:?}*y + {:?}*z = {:?}",
                normal[0], normal[1], offset
            ),
            Surface::Lattice { normal, spacing } => write!(
                f,
                "lattice {:?}*y + {:?}*z = m*{:?}, m integer",
                normal[0], normal[1], spacing
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("point lies inside the pole guard: |{var}| = {distance:e} < {guard:e}")]
    Pole {
        var: &'static str,
        distance: f64,
        guard: f64,
    },
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error(
        "resonance violation: the constant forcing term 2(k-2)(1-2k)/9 = {value:?} of the g-equation must vanish, which needs k = 1/2 or k = 2 (got k = {k:?})"
    )]
    KResonance { k: f64, value: f64 },
    #[error("resonance violation in the {field} equation at index {index}: {expr} does not vanish")]
    Resonance {
        field: &'static str,
        index: i32,
        expr: String,
    },
    #[error(transparent)]
    Series(SeriesError),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Elliptic(#[from] WpError),
    #[error("a^2 + b^2 = {0:?}; the direction (a, b) must be a unit vector")]
    Normalization(f64),
    #[error(
        "formula mode with gamma2 != 0 reproduces a known misprinted constant; set the audit flag to build it anyway"
    )]
    AuditRequired,
    #[error("`{name}` must be polynomial in {var}")]
    NotPolynomial { name: String, var: &'static str },
    #[error("this family has no closed-form transcription; use solver mode")]
    NoFormula,
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    Invalid(String),
}

impl FamilyError {
    /// Whether the error stems from malformed input rather than the
    /// mathematics of the construction.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            FamilyError::NotPolynomial { .. }
                | FamilyError::NoFormula
                | FamilyError::AuditRequired
                | FamilyError::Invalid(_)
        )
    }

    pub(crate) fn from_series(e: SeriesError, field: &'static str, names: &[String]) -> FamilyError {
        match e {
            SeriesError::Resonance { index, coeff } => FamilyError::Resonance {
                field,
                index,
                expr: coeff.render(names),
            },
            SeriesError::EtaResonance { index, coeff } => FamilyError::Resonance {
                field,
                index,
                expr: coeff.render(names),
            },
            other => FamilyError::Series(other),
        }
    }
}

/// A constructed solution; immutable and shareable across threads.
#[derive(Clone, Debug)]
pub struct XPolySolution {
    family: Family,
    equation: Equation,
    mode: Mode,
    params: ParamTable,
    coeffs: Vec<Coeff>,
    frame: Option<Frame>,
    extra: usize,
}

impl XPolySolution {
    pub(crate) fn new(
        family: Family,
        equation: Equation,
        mode: Mode,
        params: ParamTable,
        mut coeffs: Vec<Coeff>,
        frame: Option<Frame>,
    ) -> XPolySolution {
        coeffs.resize(4, Coeff::Zero);
        let mut extra = coeffs.iter().map(Coeff::max_atom_order).max().unwrap_or(0);
        match &frame {
            Some(Frame::Line { shift, .. }) => {
                extra = extra.max(shift.max_atom_order().unwrap_or(0));
            }
            Some(Frame::Plane { alpha, beta }) => {
                extra = extra
                    .max(alpha.max_atom_order().unwrap_or(0))
                    .max(beta.max_atom_order().unwrap_or(0));
            }
            None => {}
        }
        XPolySolution {
            family,
            equation,
            mode,
            params,
            coeffs,
            frame,
            extra: extra as usize,
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn equation(&self) -> Equation {
        self.equation
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn params(&self) -> &ParamTable {
        &self.params
    }

    pub fn frame(&self) -> Option<&Frame> {
        self.frame.as_ref()
    }

    /// `C_m`, zero beyond the ansatz degree.
    pub fn coeff(&self, m: usize) -> &Coeff {
        &self.coeffs[m]
    }

    pub fn coeffs(&self) -> &[Coeff] {
        &self.coeffs
    }

    pub fn param_jets(&self, t: f64, order: usize) -> Result<ParamJets, ParamError> {
        self.params.jets(t, order, self.extra)
    }

    fn is_singular(&self) -> bool {
        self.coeffs.iter().any(Coeff::is_singular)
    }

    /// The singular set at time `t`.
    pub fn surface(&self, t: f64) -> Result<Surface, FieldError> {
        if let Some(Coeff::Elliptic(e)) = self.coeffs.iter().find(|c| matches!(c, Coeff::Elliptic(_))) {
            let n = (e.a * e.a + e.b * e.b).sqrt();
            return Ok(Surface::Lattice {
                normal: [e.a / n, e.b / n],
                spacing: e.wp.period() / n,
            });
        }
        if !self.is_singular() {
            return Ok(Surface::None);
        }
        let jets = self.param_jets(t, 0)?;
        match &self.frame {
            Some(Frame::Line { scale, shift }) => Ok(Surface::Line {
                y: -shift.value(&jets) / scale,
            }),
            Some(Frame::Plane { alpha, beta }) => {
                let a = alpha.value(&jets);
                Ok(Surface::Plane {
                    normal: [a.cos(), a.sin()],
                    offset: -beta.value(&jets),
                })
            }
            None => Ok(Surface::None),
        }
    }

    /// Coefficient fields `C_0..C_3` as jets in `orders` at `(t, y, z)`.
    pub fn coeff_jets(
        &self,
        t: f64,
        y: f64,
        z: f64,
        orders: OrderBox,
        guard: f64,
    ) -> Result<Vec<Jet>, FieldError> {
        let jets = self.param_jets(t, orders.order(Coord::T) as usize)?;
        self.coeff_jets_with(&jets, y, z, orders, guard)
    }

    fn coeff_jets_with(
        &self,
        jets: &ParamJets,
        y: f64,
        z: f64,
        orders: OrderBox,
        guard: f64,
    ) -> Result<Vec<Jet>, FieldError> {
        let yj = Jet::lift(y, Coord::Y, orders);
        let zj = Jet::lift(z, Coord::Z, orders);
        let mut frame_jets: Option<(Jet, Jet)> = None;
        let mut out = Vec::with_capacity(4);
        for c in &self.coeffs {
            let j = match c {
                Coeff::Zero => Jet::zero(orders),
                Coeff::Radial(r) => {
                    if r.is_singular() {
                        let s = r.s_value(jets, y);
                        if !(s.abs() >= guard) {
                            return Err(FieldError::Pole {
                                var: "s",
                                distance: s.abs(),
                                guard,
                            });
                        }
                    }
                    r.eval_jet(jets, y, orders)?
                }
                Coeff::Bi(b) => {
                    if frame_jets.is_none() {
                        frame_jets = Some(self.plane_jets(jets, &yj, &zj)?);
                    }
                    let (zeta, eta) = frame_jets.as_ref().unwrap();
                    if b.is_singular() && !(zeta.value().abs() >= guard) {
                        return Err(FieldError::Pole {
                            var: "zeta",
                            distance: zeta.value().abs(),
                            guard,
                        });
                    }
                    b.eval_jet(jets, zeta, eta)?
                }
                Coeff::PolyYZ(p) => p.eval_jet(jets, &yj, &zj),
                Coeff::Elliptic(e) => {
                    let arg = &yj.scale(e.a) + &zj.scale(e.b);
                    let w = arg.value();
                    let d = e
                        .wp
                        .derivs(w, orders.total_order(), guard)
                        .map_err(|_| FieldError::Pole {
                            var: "elliptic argument",
                            distance: (w - e.wp.nearest_pole(w)).abs(),
                            guard,
                        })?;
                    arg.compose(&d)
                }
            };
            out.push(j);
        }
        Ok(out)
    }

    fn plane_jets(&self, jets: &ParamJets, y: &Jet, z: &Jet) -> Result<(Jet, Jet), FieldError> {
        let Some(Frame::Plane { alpha, beta }) = &self.frame else {
            return Err(FieldError::Jet(JetError::Domain {
                op: "moving frame",
                value: f64::NAN,
            }));
        };
        let orders = y.orders();
        let a = Jet::from_univariate(Coord::T, &alpha.eval(jets), orders);
        let b = Jet::from_univariate(Coord::T, &beta.eval(jets), orders);
        let (c, s) = (a.cos(), a.sin());
        let zeta = &(&(&c * y) + &(&s * z)) + &b;
        let eta = &(&c * z) - &(&s * y);
        Ok((zeta, eta))
    }

    /// `u` as a jet in `orders` at `p = (t, x, y, z)`.
    pub fn eval_jet(&self, p: [f64; 4], orders: OrderBox, guard: f64) -> Result<Jet, FieldError> {
        let jets = self.param_jets(p[0], orders.order(Coord::T) as usize)?;
        let c = self.coeff_jets_with(&jets, p[2], p[3], orders, guard)?;
        let x = Jet::lift(p[1], Coord::X, orders);
        let mut u = c[3].clone();
        for m in (0..3).rev() {
            u = &(&u * &x) + &c[m];
        }
        Ok(u)
    }

    pub fn eval(&self, p: [f64; 4], guard: f64) -> Result<f64, FieldError> {
        Ok(self.eval_jet(p, OrderBox::SCALAR, guard)?.value())
    }

    /// Distance from `p` to the singular set, measured in the frame variable
    /// the pole guard applies to; infinite for regular families.
    pub fn guard_distance(&self, p: [f64; 4]) -> Result<f64, FieldError> {
        let mut d = f64::INFINITY;
        let jets = self.param_jets(p[0], 0)?;
        for c in &self.coeffs {
            match c {
                Coeff::Radial(r) if r.is_singular() => d = d.min(r.s_value(&jets, p[2]).abs()),
                Coeff::Bi(b) if b.is_singular() => {
                    let orders = OrderBox::SCALAR;
                    let y = Jet::constant(p[2], orders);
                    let z = Jet::constant(p[3], orders);
                    let (zeta, _) = self.plane_jets(&jets, &y, &z)?;
                    d = d.min(zeta.value().abs());
                }
                Coeff::Elliptic(e) => {
                    let w = e.a * p[2] + e.b * p[3];
                    d = d.min((w - e.wp.nearest_pole(w)).abs());
                }
                _ => {}
            }
        }
        Ok(d)
    }

    /// Human-readable form of each coefficient.
    pub fn render_coeffs(&self) -> Vec<String> {
        self.coeffs[..self.equation.n_coeffs()]
            .iter()
            .map(|c| c.render(self.params.names()))
            .collect()
    }
}

/// Registers `f` under `name` and returns its symbol; identically zero
/// functions become the zero expression so they drop out symbolically.
pub(crate) fn register(table: &mut ParamTable, name: &str, f: &ParamFn) -> TExpr {
    let id = table.insert_fn(name, f.clone());
    if f.is_zero() {
        TExpr::zero()
    } else {
        TExpr::param(id)
    }
}

#[cfg(test)]
mod tests;
