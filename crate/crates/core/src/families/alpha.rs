//! The rotation angle fixed by the quadratic-coefficient constraint of the
//! 3-D blow-up family: `9 alpha'^2 = 6 gamma2' - 5 gamma2^2`.

use crate::jet::{Coord, Jet, OrderBox};
use crate::paramdsl::ParamFn;
use crate::texpr::ParamError;

const QUAD_TOL: f64 = 1e-13;
const MAX_DEPTH: u32 = 40;

// Kronrod nodes in (0, 1) by decreasing abscissa; odd entries are the Gauss nodes.
const KRONROD_X: [f64; 7] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
];
// Index 7 is the centre weight.
const KRONROD_W: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
// Weights of the nodes 1, 3, 5 and the centre.
const GAUSS_W: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// `alpha(t) = alpha0 + (eps/3) * int_{t0}^{t} sqrt(R)`, `R = 6 gamma2' - 5 gamma2^2`.
#[derive(Debug, Clone)]
pub struct AlphaFn {
    gamma2: ParamFn,
    eps: f64,
    t0: f64,
    alpha0: f64,
}

impl AlphaFn {
    pub fn new(gamma2: ParamFn, eps: f64, t0: f64, alpha0: f64) -> Result<AlphaFn, ParamError> {
        let a = AlphaFn {
            gamma2,
            eps: if eps < 0.0 { -1.0 } else { 1.0 },
            t0,
            alpha0,
        };
        let r = a.radicand(t0)?;
        if r < 0.0 {
            return Err(ParamError::NegativeRadicand { t: t0, value: r });
        }
        Ok(a)
    }

    pub fn gamma2(&self) -> &ParamFn {
        &self.gamma2
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    fn gamma_derivs(&self, t: f64, order: usize) -> Result<Vec<f64>, ParamError> {
        self.gamma2
            .eval_jet(t, order)
            .map_err(|source| ParamError::Eval {
                name: "gamma2".into(),
                source,
            })
    }

    /// `R` and its first `order` derivatives.
    pub fn radicand_derivs(&self, t: f64, order: usize) -> Result<Vec<f64>, ParamError> {
        let g = self.gamma_derivs(t, order + 1)?;
        let gj = Jet::from_univariate(Coord::T, &g[..=order], OrderBox::univariate(order as u8));
        let sq = (&gj * &gj).derivs_along(Coord::T);
        Ok((0..=order).map(|k| 6.0 * g[k + 1] - 5.0 * sq[k]).collect())
    }

    pub fn radicand(&self, t: f64) -> Result<f64, ParamError> {
        let g = self.gamma_derivs(t, 1)?;
        Ok(6.0 * g[1] - 5.0 * g[0] * g[0])
    }

    fn integrand(&self, t: f64) -> Result<f64, ParamError> {
        let r = self.radicand(t)?;
        if r < 0.0 {
            return Err(ParamError::NegativeRadicand { t, value: r });
        }
        Ok(self.eps / 3.0 * r.sqrt())
    }

    /// First point between `t0` and `t` where the radicand turns negative.
    fn first_violation(&self, t: f64) -> ParamError {
        const STEPS: usize = 4096;
        let mut ok = self.t0;
        for i in 1..=STEPS {
            let s = self.t0 + (t - self.t0) * i as f64 / STEPS as f64;
            match self.radicand(s) {
                Ok(r) if r >= 0.0 => ok = s,
                Ok(_) => {
                    let (mut lo, mut hi) = (ok, s);
                    for _ in 0..60 {
                        let mid = 0.5 * (lo + hi);
                        match self.radicand(mid) {
                            Ok(r) if r >= 0.0 => lo = mid,
                            _ => hi = mid,
                        }
                    }
                    let value = self.radicand(hi).unwrap_or(f64::NAN);
                    return ParamError::NegativeRadicand { t: hi, value };
                }
                Err(e) => return e,
            }
        }
        match self.radicand(t) {
            Ok(value) => ParamError::NegativeRadicand { t, value },
            Err(e) => e,
        }
    }

    pub fn value(&self, t: f64) -> Result<f64, ParamError> {
        if self.gamma2.is_zero() || t == self.t0 {
            return Ok(self.alpha0);
        }
        match self.integrate(self.t0, t) {
            Ok(v) => Ok(self.alpha0 + v),
            Err(ParamError::NegativeRadicand { .. }) => Err(self.first_violation(t)),
            Err(e) => Err(e),
        }
    }

    fn integrate(&self, a: f64, b: f64) -> Result<f64, ParamError> {
        self.kronrod(a, b, QUAD_TOL, MAX_DEPTH)
    }

    /// Adaptive 7/15-point Gauss-Kronrod; bisects until the two rules agree.
    fn kronrod(&self, a: f64, b: f64, tol: f64, depth: u32) -> Result<f64, ParamError> {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let f0 = self.integrand(c)?;
        let mut k = KRONROD_W[7] * f0;
        let mut g = GAUSS_W[3] * f0;
        for i in 0..7 {
            let fs = self.integrand(c - h * KRONROD_X[i])? + self.integrand(c + h * KRONROD_X[i])?;
            k += KRONROD_W[i] * fs;
            if i % 2 == 1 {
                g += GAUSS_W[i / 2] * fs;
            }
        }
        let (k, g) = (k * h, g * h);
        if depth == 0 || (k - g).abs() <= tol {
            return Ok(k);
        }
        Ok(self.kronrod(a, c, tol / 2.0, depth - 1)? + self.kronrod(c, b, tol / 2.0, depth - 1)?)
    }

    /// `alpha(t), alpha'(t), ..., alpha^(order)(t)`; the derivative slots come
    /// from the radicand's jet, not from the quadrature.
    pub fn derivs(&self, t: f64, order: usize) -> Result<Vec<f64>, ParamError> {
        let mut out = vec![self.value(t)?];
        if order == 0 {
            return Ok(out);
        }
        if self.gamma2.is_zero() {
            out.resize(order + 1, 0.0);
            return Ok(out);
        }
        let r = self.radicand_derivs(t, order - 1)?;
        if r[0] < 0.0 {
            return Err(self.first_violation(t));
        }
        if r[0] == 0.0 {
            if r.iter().all(|&v| v == 0.0) {
                out.resize(order + 1, 0.0);
                return Ok(out);
            }
            if order >= 2 {
                return Err(ParamError::DegenerateRadicand { t });
            }
            out.push(0.0);
            return Ok(out);
        }
        let rj = Jet::from_univariate(Coord::T, &r, OrderBox::univariate((order - 1) as u8));
        let root = rj.sqrt().expect("positive radicand");
        out.extend(
            root.derivs_along(Coord::T)
                .into_iter()
                .map(|d| self.eps / 3.0 * d),
        );
        Ok(out)
    }
}
