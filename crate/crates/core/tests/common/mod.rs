//! Shared helpers for the integration tests.
#![allow(dead_code)]

use stablerange::jet::{Coord, Jet, MultiIndex, OrderBox};

pub const BOX: OrderBox = OrderBox([2, 2, 2, 0]);
pub const TOL: f64 = 1e-13;

/// Coefficients of `t^a x^b y^c`, `a, b, c <= 2`, indexed `9a + 3b + c`.
pub type Poly = Vec<f64>;

pub fn falling(n: u8, k: u8) -> f64 {
    (0..k).map(|i| (n - i) as f64).product()
}

pub fn binom(n: u8, k: u8) -> f64 {
    falling(n, k) / falling(k, k)
}

/// Exact mixed partial of a polynomial at `p`.
pub fn poly_partial(c: &Poly, p: [f64; 3], a: MultiIndex) -> f64 {
    let mut s = 0.0;
    for (i, &ci) in c.iter().enumerate() {
        let e = [(i / 9) as u8, (i / 3 % 3) as u8, (i % 3) as u8];
        if (0..3).any(|d| e[d] < a[d]) {
            continue;
        }
        let mut term = ci;
        for d in 0..3 {
            term *= falling(e[d], a[d]) * p[d].powi((e[d] - a[d]) as i32);
        }
        s += term;
    }
    s
}

pub fn poly_jet(c: &Poly, p: [f64; 3]) -> Jet {
    let v = [
        Jet::lift(p[0], Coord::T, BOX),
        Jet::lift(p[1], Coord::X, BOX),
        Jet::lift(p[2], Coord::Y, BOX),
    ];
    let mut out = Jet::zero(BOX);
    for (i, &ci) in c.iter().enumerate() {
        let e = [i / 9, i / 3 % 3, i % 3];
        let mut m = Jet::constant(ci, BOX);
        for d in 0..3 {
            for _ in 0..e[d] {
                m = &m * &v[d];
            }
        }
        out = &out + &m;
    }
    out
}

pub fn indices() -> Vec<MultiIndex> {
    let mut v = Vec::new();
    for a in 0..=2 {
        for b in 0..=2 {
            for c in 0..=2 {
                v.push([a, b, c, 0]);
            }
        }
    }
    v
}

/// `sum_{beta <= alpha} C(alpha, beta) f(beta) g(alpha - beta)` and the sum
/// of the absolute terms.
pub fn leibniz(alpha: MultiIndex, f: impl Fn(MultiIndex) -> f64, g: impl Fn(MultiIndex) -> f64) -> (f64, f64) {
    let (mut s, mut scale) = (0.0, 0.0);
    for beta in indices() {
        if (0..3).any(|d| beta[d] > alpha[d]) {
            continue;
        }
        let rest = [alpha[0] - beta[0], alpha[1] - beta[1], alpha[2] - beta[2], 0];
        let c: f64 = (0..3).map(|d| binom(alpha[d], beta[d])).product();
        let term = c * f(beta) * g(rest);
        s += term;
        scale += term.abs();
    }
    (s, scale)
}

pub fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= TOL * scale.max(a.abs()).max(b.abs()).max(1.0)
}

/// Product rule on two random polynomials; `Err` names the first bad slot.
pub fn check_product(f: &Poly, g: &Poly, p: [f64; 3]) -> Result<(), String> {
    let (jf, jg) = (poly_jet(f, p), poly_jet(g, p));
    let prod = &jf * &jg;
    for a in indices() {
        let exact = poly_partial(f, p, a);
        let got = jf.partial(a).unwrap();
        if !close(got, exact, 1.0) {
            return Err(format!("lift {a:?}: {got} vs {exact}"));
        }
        let (want, scale) = leibniz(a, |b| poly_partial(f, p, b), |b| poly_partial(g, p, b));
        let got = prod.partial(a).unwrap();
        if !close(got, want, scale) {
            return Err(format!("product {a:?}: {got} vs {want}"));
        }
    }
    Ok(())
}

/// `d_v phi(g) = phi'(g) d_v g` slot by slot for `phi` in exp, sin, cos.
pub fn check_chain(g: &Poly, p: [f64; 3], which: usize) -> Result<(), String> {
    let jg = poly_jet(g, p);
    let (phi, dphi) = match which {
        0 => (jg.exp(), jg.exp()),
        1 => (jg.sin(), jg.cos()),
        _ => (jg.cos(), jg.sin().scale(-1.0)),
    };
    for v in 0..3 {
        for a in indices() {
            if a[v] == 2 {
                continue;
            }
            let mut up = a;
            up[v] += 1;
            let (want, scale) = leibniz(
                a,
                |b| dphi.partial(b).unwrap(),
                |b| {
                    let mut bb = b;
                    bb[v] += 1;
                    jg.partial(bb).unwrap()
                },
            );
            let got = phi.partial(up).unwrap();
            if !close(got, want, scale) {
                return Err(format!("chain {which} d{v} {a:?}: {got} vs {want}"));
            }
        }
    }
    Ok(())
}
