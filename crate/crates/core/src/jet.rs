//! Truncated multivariate Taylor arithmetic ("jets") over the coordinates
//! `(t, x, y, z)`.
//!
//! A [`Jet`] stores the mixed partial derivatives of a quantity at a point,
//! indexed by a multi-index inside a per-coordinate [`OrderBox`]. Values are
//! kept in derivative convention: the slot for multi-index `(1, 0, 2, 0)` holds
//! `∂t ∂y² f`, not the Taylor coefficient `∂t ∂y² f / 2!`. Products use the
//! multivariate Leibniz rule, so every composed evaluator yields exact partials
//! up to the box, with truncation only discarding orders outside it.

use std::collections::HashMap;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use thiserror::Error;

/// Number of coordinates a jet can depend on.
pub const NUM_COORDS: usize = 4;

/// A coordinate of the solution space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coord {
    T,
    X,
    Y,
    Z,
}

impl Coord {
    pub const ALL: [Coord; NUM_COORDS] = [Coord::T, Coord::X, Coord::Y, Coord::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Coord::T => "t",
            Coord::X => "x",
            Coord::Y => "y",
            Coord::Z => "z",
        }
    }
}

/// Multi-index of a mixed partial derivative, ordered `[t, x, y, z]`.
pub type MultiIndex = [u8; NUM_COORDS];

/// Per-coordinate maximum derivative order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OrderBox(pub [u8; NUM_COORDS]);

impl OrderBox {
    /// The box holding only the value slot.
    pub const SCALAR: OrderBox = OrderBox([0; NUM_COORDS]);

    pub fn new(t: u8, x: u8, y: u8, z: u8) -> Self {
        OrderBox([t, x, y, z])
    }

    /// Box for a function of `t` alone.
    pub fn univariate(order: u8) -> Self {
        OrderBox([order, 0, 0, 0])
    }

    pub fn order(&self, c: Coord) -> u8 {
        self.0[c.index()]
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|&o| o as usize + 1).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Highest total degree representable in the box.
    pub fn total_order(&self) -> usize {
        self.0.iter().map(|&o| o as usize).sum()
    }

    pub fn contains(&self, idx: MultiIndex) -> bool {
        idx.iter().zip(self.0.iter()).all(|(i, o)| i <= o)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("division by a jet whose value is zero")]
    DivisionByZero,
    #[error("{op} is undefined at value {value}")]
    Domain { op: &'static str, value: f64 },
    #[error("order boxes differ: {0:?} vs {1:?}")]
    BoxMismatch(OrderBox, OrderBox),
    #[error("multi-index {0:?} lies outside the order box {1:?}")]
    OutOfBox(MultiIndex, OrderBox),
}

/// Scalar field a jet can be built over.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(v: f64) -> Self;
    fn magnitude(self) -> f64;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    /// Whether `ln` is defined (real: positive; complex: nonzero).
    fn ln_defined(self) -> bool;
    /// Whether `sqrt` is differentiable (real: positive; complex: nonzero).
    fn sqrt_defined(self) -> bool;
    /// Real part used in error reports.
    fn report(self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn ln_defined(self) -> bool {
        self > 0.0
    }
    fn sqrt_defined(self) -> bool {
        self > 0.0
    }
    fn report(self) -> f64 {
        self
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_f64(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn ln(self) -> Self {
        Complex64::ln(self)
    }
    fn sqrt(self) -> Self {
        Complex64::sqrt(self)
    }
    fn exp(self) -> Self {
        Complex64::exp(self)
    }
    fn sin(self) -> Self {
        Complex64::sin(self)
    }
    fn cos(self) -> Self {
        Complex64::cos(self)
    }
    fn ln_defined(self) -> bool {
        self != Self::zero()
    }
    fn sqrt_defined(self) -> bool {
        self != Self::zero()
    }
    fn report(self) -> f64 {
        self.re
    }
}

/// Index arithmetic and the Leibniz product table for one order box.
#[derive(Debug)]
struct Layout {
    orders: OrderBox,
    strides: [usize; NUM_COORDS],
    indices: Vec<MultiIndex>,
    /// `(out, lhs, rhs, binomial weight)` for every split of every slot.
    products: Vec<(u32, u32, u32, f64)>,
}

fn binomial(n: u8, k: u8) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

impl Layout {
    fn build(orders: OrderBox) -> Layout {
        let mut strides = [1usize; NUM_COORDS];
        for d in (0..NUM_COORDS - 1).rev() {
            strides[d] = strides[d + 1] * (orders.0[d + 1] as usize + 1);
        }
        let len = orders.len();
        let mut indices = Vec::with_capacity(len);
        for flat in 0..len {
            let mut idx = [0u8; NUM_COORDS];
            let mut rem = flat;
            for d in 0..NUM_COORDS {
                idx[d] = (rem / strides[d]) as u8;
                rem %= strides[d];
            }
            indices.push(idx);
        }
        let flat_of = |idx: &MultiIndex| -> usize {
            idx.iter().zip(strides.iter()).map(|(&i, &s)| i as usize * s).sum()
        };
        let mut products = Vec::new();
        for out in &indices {
            for lhs in &indices {
                if !lhs.iter().zip(out.iter()).all(|(a, b)| a <= b) {
                    continue;
                }
                let mut rhs = [0u8; NUM_COORDS];
                let mut weight = 1.0;
                for d in 0..NUM_COORDS {
                    rhs[d] = out[d] - lhs[d];
                    weight *= binomial(out[d], lhs[d]);
                }
                products.push((
                    flat_of(out) as u32,
                    flat_of(lhs) as u32,
                    flat_of(&rhs) as u32,
                    weight,
                ));
            }
        }
        Layout {
            orders,
            strides,
            indices,
            products,
        }
    }

    fn flat(&self, idx: MultiIndex) -> usize {
        idx.iter()
            .zip(self.strides.iter())
            .map(|(&i, &s)| i as usize * s)
            .sum()
    }
}

fn layout_for(orders: OrderBox) -> Arc<Layout> {
    static CACHE: OnceLock<RwLock<HashMap<OrderBox, Arc<Layout>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(l) = cache.read().expect("layout cache poisoned").get(&orders) {
        return l.clone();
    }
    let mut w = cache.write().expect("layout cache poisoned");
    w.entry(orders)
        .or_insert_with(|| Arc::new(Layout::build(orders)))
        .clone()
}

/// Mixed partial derivatives of a quantity at a point, truncated to a box.
#[derive(Clone, Debug)]
pub struct Jet<S: Scalar = f64> {
    layout: Arc<Layout>,
    data: Vec<S>,
}

impl<S: Scalar> PartialEq for Jet<S> {
    fn eq(&self, other: &Self) -> bool {
        self.layout.orders == other.layout.orders && self.data == other.data
    }
}

impl<S: Scalar> Jet<S> {
    /// A jet with no dependence on any coordinate.
    pub fn constant(value: S, orders: OrderBox) -> Self {
        let layout = layout_for(orders);
        let mut data = vec![S::zero(); layout.indices.len()];
        data[0] = value;
        Jet { layout, data }
    }

    pub fn zero(orders: OrderBox) -> Self {
        Self::constant(S::zero(), orders)
    }

    /// Seeds coordinate `var` at `value`: unit first derivative in its own
    /// slot, everything else zero.
    pub fn lift(value: S, var: Coord, orders: OrderBox) -> Self {
        let mut j = Self::constant(value, orders);
        if orders.order(var) >= 1 {
            let mut idx = [0u8; NUM_COORDS];
            idx[var.index()] = 1;
            let f = j.layout.flat(idx);
            j.data[f] = S::one();
        }
        j
    }

    /// Embeds derivative values of a function of one coordinate:
    /// `derivs[k]` is the k-th derivative along `var`.
    pub fn from_univariate(var: Coord, derivs: &[S], orders: OrderBox) -> Self {
        let mut j = Self::zero(orders);
        let n = (orders.order(var) as usize + 1).min(derivs.len());
        for (k, &d) in derivs.iter().enumerate().take(n) {
            let mut idx = [0u8; NUM_COORDS];
            idx[var.index()] = k as u8;
            let f = j.layout.flat(idx);
            j.data[f] = d;
        }
        j
    }

    pub fn orders(&self) -> OrderBox {
        self.layout.orders
    }

    pub fn value(&self) -> S {
        self.data[0]
    }

    /// The stored mixed partial at `idx`.
    pub fn partial(&self, idx: MultiIndex) -> Result<S, JetError> {
        if !self.layout.orders.contains(idx) {
            return Err(JetError::OutOfBox(idx, self.layout.orders));
        }
        Ok(self.data[self.layout.flat(idx)])
    }

    /// Derivatives along a single coordinate, orders `0..=box order`.
    pub fn derivs_along(&self, var: Coord) -> Vec<S> {
        (0..=self.layout.orders.order(var))
            .map(|k| {
                let mut idx = [0u8; NUM_COORDS];
                idx[var.index()] = k;
                self.data[self.layout.flat(idx)]
            })
            .collect()
    }

    /// All `(multi-index, value)` slots in storage order.
    pub fn slots(&self) -> impl Iterator<Item = (MultiIndex, S)> + '_ {
        self.layout.indices.iter().copied().zip(self.data.iter().copied())
    }

    fn check(&self, other: &Self) -> Result<(), JetError> {
        if self.layout.orders != other.layout.orders {
            return Err(JetError::BoxMismatch(
                self.layout.orders,
                other.layout.orders,
            ));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, JetError> {
        self.check(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, JetError> {
        self.check(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, JetError> {
        self.check(other)?;
        let mut out = vec![S::zero(); self.data.len()];
        for &(o, a, b, w) in &self.layout.products {
            let term = self.data[a as usize] * other.data[b as usize];
            out[o as usize] = out[o as usize] + term * S::from_f64(w);
        }
        Ok(Jet {
            layout: self.layout.clone(),
            data: out,
        })
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, JetError> {
        self.check(other)?;
        Ok(self * &other.recip()?)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(S, S) -> S) -> Self {
        Jet {
            layout: self.layout.clone(),
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, s: S) -> Self {
        Jet {
            layout: self.layout.clone(),
            data: self.data.iter().map(|&a| a * s).collect(),
        }
    }

    pub fn add_scalar(&self, s: S) -> Self {
        let mut j = self.clone();
        j.data[0] = j.data[0] + s;
        j
    }

    /// Applies a univariate function given its derivatives at the current
    /// value: `derivs[k] = φ⁽ᵏ⁾(value)`. Derivatives beyond the box's total
    /// order are ignored; missing ones are treated as zero.
    pub fn compose(&self, derivs: &[S]) -> Self {
        let order = self.layout.orders.total_order();
        let mut out = Self::constant(derivs.first().copied().unwrap_or(S::zero()), self.orders());
        if order == 0 {
            return out;
        }
        let mut delta = self.clone();
        delta.data[0] = S::zero();
        let mut power = delta.clone();
        let mut inv_fact = 1.0;
        for k in 1..=order {
            inv_fact /= k as f64;
            if let Some(&d) = derivs.get(k) {
                if d != S::zero() {
                    let c = d * S::from_f64(inv_fact);
                    for (o, p) in out.data.iter_mut().zip(power.data.iter()) {
                        *o = *o + *p * c;
                    }
                }
            }
            if k < order {
                power = &power * &delta;
            }
        }
        out
    }

    pub fn recip(&self) -> Result<Self, JetError> {
        let a = self.value();
        if a == S::zero() {
            return Err(JetError::DivisionByZero);
        }
        let n = self.layout.orders.total_order();
        let inv = S::one() / a;
        let mut derivs = Vec::with_capacity(n + 1);
        // d^k/da^k a^{-1} = (-1)^k k! a^{-k-1}
        let mut d = inv;
        for k in 0..=n {
            derivs.push(d);
            d = d * inv * S::from_f64(-((k + 1) as f64));
        }
        Ok(self.compose(&derivs))
    }

    /// Integer power; negative exponents need a nonzero value.
    pub fn powi(&self, n: i32) -> Result<Self, JetError> {
        if n == 0 {
            return Ok(Self::constant(S::one(), self.orders()));
        }
        let base = if n < 0 { self.recip()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc: Option<Self> = None;
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => &a * &sq,
                });
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc.expect("nonzero exponent"))
    }

    pub fn ln(&self) -> Result<Self, JetError> {
        let a = self.value();
        if !a.ln_defined() {
            return Err(JetError::Domain {
                op: "ln",
                value: a.report(),
            });
        }
        Ok(self.compose(&log_derivs(a, self.layout.orders.total_order())))
    }

    pub fn sqrt(&self) -> Result<Self, JetError> {
        let a = self.value();
        if !a.sqrt_defined() {
            return Err(JetError::Domain {
                op: "sqrt",
                value: a.report(),
            });
        }
        let n = self.layout.orders.total_order();
        let r = a.sqrt();
        let inv = S::one() / a;
        let mut derivs = Vec::with_capacity(n + 1);
        let mut d = r;
        for k in 0..=n {
            derivs.push(d);
            d = d * inv * S::from_f64(0.5 - k as f64);
        }
        Ok(self.compose(&derivs))
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        let n = self.layout.orders.total_order();
        self.compose(&vec![e; n + 1])
    }

    pub fn sin(&self) -> Self {
        let (s, c) = (self.value().sin(), self.value().cos());
        let n = self.layout.orders.total_order();
        let cycle = [s, c, -s, -c];
        self.compose(&(0..=n).map(|k| cycle[k % 4]).collect::<Vec<_>>())
    }

    pub fn cos(&self) -> Self {
        let (s, c) = (self.value().sin(), self.value().cos());
        let n = self.layout.orders.total_order();
        let cycle = [c, -s, -c, s];
        self.compose(&(0..=n).map(|k| cycle[k % 4]).collect::<Vec<_>>())
    }
}

impl Jet<f64> {
    /// `ln|a|`, defined for any nonzero value.
    pub fn ln_abs(&self) -> Result<Self, JetError> {
        let a = self.value();
        if a == 0.0 {
            return Err(JetError::Domain {
                op: "ln|.|",
                value: a,
            });
        }
        let mut d = log_derivs(a, self.layout.orders.total_order());
        d[0] = a.abs().ln();
        Ok(self.compose(&d))
    }

    /// Largest absolute slot value.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn log_derivs<S: Scalar>(a: S, n: usize) -> Vec<S> {
    let mut derivs = Vec::with_capacity(n + 1);
    derivs.push(a.ln());
    let inv = S::one() / a;
    // d^k/da^k ln a = (-1)^{k-1} (k-1)! a^{-k}
    let mut d = inv;
    for k in 1..=n {
        derivs.push(d);
        d = d * inv * S::from_f64(-(k as f64));
    }
    derivs
}

impl<'a, S: Scalar> Add for &'a Jet<S> {
    type Output = Jet<S>;
    /// Panics on box mismatch; use [`Jet::try_add`] for a fallible version.
    fn add(self, rhs: Self) -> Jet<S> {
        self.try_add(rhs).expect("jet box mismatch")
    }
}

impl<'a, S: Scalar> Sub for &'a Jet<S> {
    type Output = Jet<S>;
    fn sub(self, rhs: Self) -> Jet<S> {
        self.try_sub(rhs).expect("jet box mismatch")
    }
}

impl<'a, S: Scalar> Mul for &'a Jet<S> {
    type Output = Jet<S>;
    fn mul(self, rhs: Self) -> Jet<S> {
        self.try_mul(rhs).expect("jet box mismatch")
    }
}

impl<'a, S: Scalar> Neg for &'a Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        self.scale(-S::one())
    }
}

impl<S: Scalar> Add for Jet<S> {
    type Output = Jet<S>;
    fn add(self, rhs: Self) -> Jet<S> {
        &self + &rhs
    }
}

impl<S: Scalar> Sub for Jet<S> {
    type Output = Jet<S>;
    fn sub(self, rhs: Self) -> Jet<S> {
        &self - &rhs
    }
}

impl<S: Scalar> Mul for Jet<S> {
    type Output = Jet<S>;
    fn mul(self, rhs: Self) -> Jet<S> {
        &self * &rhs
    }
}

/// Leibniz product of two univariate derivative lists of equal length.
pub fn univariate_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().min(b.len());
    let mut out = vec![0.0; n];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut c = 1.0;
        let mut acc = 0.0;
        for i in 0..=k {
            acc += c * a[i] * b[k - i];
            c = c * (k - i) as f64 / (i + 1) as f64;
        }
        *slot = acc;
    }
    out
}
