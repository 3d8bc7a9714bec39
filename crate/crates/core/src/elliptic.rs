//! Weierstrass `P` with invariants `g2 = 0`, `g3 = 4*iota`, i.e.
//! `P'^2 = 4(P^3 - iota)`, on the real line.

use thiserror::Error;

/// Highest power of `w` kept in the Laurent series.
const SERIES_MAX_POWER: usize = 30;
const TAIL_TOL: f64 = 1e-14;
const MAX_DOUBLINGS: u32 = 6;
pub const DEFAULT_POLE_GUARD: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WpError {
    #[error("iota must be a nonzero finite number, got {0}")]
    DegenerateIota(f64),
    #[error("argument {w} lies within {guard} of the pole at {pole}")]
    Pole { w: f64, pole: f64, guard: f64 },
    #[error("failed to bracket the real half-period")]
    NoPeriod,
}

#[derive(Debug, Clone)]
pub struct WpEvaluator {
    iota: f64,
    /// `coeffs[k]` multiplies `w^(2k-2)`; `coeffs[0]` is the `w^-2` term.
    coeffs: Vec<f64>,
    radius: f64,
    half_period: f64,
}

impl WpEvaluator {
    pub fn new(iota: f64) -> Result<WpEvaluator, WpError> {
        if iota == 0.0 || !iota.is_finite() {
            return Err(WpError::DegenerateIota(iota));
        }
        let kmax = SERIES_MAX_POWER / 2 + 1;
        let mut c = vec![0.0; kmax + 1];
        c[0] = 1.0;
        c[3] = iota / 7.0;
        for k in 4..=kmax {
            let mut s = 0.0;
            for m in 2..=k - 2 {
                s += c[m] * c[k - m];
            }
            c[k] = 3.0 * s / (((2 * k + 1) * (k - 3)) as f64);
        }
        // term k contributes c_k w^(2k-2) against the leading w^-2
        let mut radius = f64::INFINITY;
        for (k, &ck) in c.iter().enumerate().skip(kmax - 2) {
            if ck != 0.0 {
                radius = radius.min((TAIL_TOL / ck.abs()).powf(1.0 / (2 * k) as f64));
            }
        }
        let mut e = WpEvaluator {
            iota,
            coeffs: c,
            radius,
            half_period: f64::INFINITY,
        };
        e.half_period = e.find_half_period()?;
        Ok(e)
    }

    pub fn iota(&self) -> f64 {
        self.iota
    }

    pub fn series_radius(&self) -> f64 {
        self.radius
    }

    /// The real half-period; poles sit at integer multiples of twice this.
    pub fn half_period(&self) -> f64 {
        self.half_period
    }

    pub fn period(&self) -> f64 {
        2.0 * self.half_period
    }

    /// `(P, P')` from the Laurent series; accurate for `|w| <= radius`.
    pub fn series(&self, w: f64) -> (f64, f64) {
        let w2 = w * w;
        let mut p = 0.0;
        let mut dp = 0.0;
        // Horner in w^2 over k >= 1 terms
        for k in (1..self.coeffs.len()).rev() {
            p = p * w2 + self.coeffs[k];
        }
        for k in (2..self.coeffs.len()).rev() {
            dp = dp * w2 + self.coeffs[k] * (2 * k - 2) as f64;
        }
        (1.0 / w2 + p, -2.0 / (w2 * w) + dp * w)
    }

    /// `(P, P')` by halving into the series radius and doubling back.
    fn unreduced(&self, w: f64) -> (f64, f64) {
        let mut n = 0;
        let mut v = w;
        while v.abs() > self.radius && n < MAX_DOUBLINGS + 8 {
            v *= 0.5;
            n += 1;
        }
        let (mut p, mut dp) = self.series(v);
        for _ in 0..n {
            let q = 3.0 * p * p / dp;
            let dq = 6.0 * p - 18.0 * p.powi(4) / (dp * dp);
            let p2 = -2.0 * p + q * q;
            let dp2 = -dp + q * dq;
            p = p2;
            dp = dp2;
        }
        (p, dp)
    }

    fn find_half_period(&self) -> Result<f64, WpError> {
        // P' < 0 on (0, half period) and changes sign there
        let step = self.radius / 4.0;
        let mut lo = step;
        let limit = self.radius * 2f64.powi(MAX_DOUBLINGS as i32);
        while lo < limit {
            let hi = lo + step;
            if self.unreduced(hi).1 >= 0.0 {
                let (mut a, mut b) = (lo, hi);
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if m <= a || m >= b {
                        break;
                    }
                    if self.unreduced(m).1 < 0.0 {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                return Ok(0.5 * (a + b));
            }
            lo = hi;
        }
        Err(WpError::NoPeriod)
    }

    /// Nearest pole to `w` on the real line.
    pub fn nearest_pole(&self, w: f64) -> f64 {
        let p = self.period();
        (w / p).round() * p
    }

    /// `(P, P', P'')` at `w`.
    pub fn wp(&self, w: f64, pole_guard: f64) -> Result<(f64, f64, f64), WpError> {
        let d = self.derivs(w, 2, pole_guard)?;
        Ok((d[0], d[1], d[2]))
    }

    /// `P, P', ..., P^(n)` at `w`; orders above one come from
    /// `P^(m+2) = 6 sum_k C(m,k) P^(k) P^(m-k)`.
    pub fn derivs(&self, w: f64, n: usize, pole_guard: f64) -> Result<Vec<f64>, WpError> {
        let pole = self.nearest_pole(w);
        let r = w - pole;
        if r.abs() < pole_guard {
            return Err(WpError::Pole {
                w,
                pole,
                guard: pole_guard,
            });
        }
        let (p, dp) = self.unreduced(r.abs());
        let dp = if r < 0.0 { -dp } else { dp };
        let mut d = vec![p, dp];
        for m in 0..n.saturating_sub(1) {
            let mut binom = 1.0;
            let mut s = 0.0;
            for k in 0..=m {
                s += binom * d[k] * d[m - k];
                binom = binom * (m - k) as f64 / (k + 1) as f64;
            }
            d.push(6.0 * s);
        }
        d.truncate(n + 1);
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ode_residual(e: &WpEvaluator, w: f64) -> f64 {
        let (p, dp, _) = e.wp(w, DEFAULT_POLE_GUARD).unwrap();
        (dp * dp - 4.0 * (p * p * p - e.iota())).abs() / (1.0 + p.abs().powi(3))
    }

    #[test]
    fn small_argument_is_dominated_by_leading_term() {
        let e = WpEvaluator::new(1.0).unwrap();
        let (p, _, _) = e.wp(0.01, DEFAULT_POLE_GUARD).unwrap();
        let expect = 1e4 + 1e-8 / 7.0;
        assert!((p - expect).abs() < 1e-10, "{p}");
    }

    #[test]
    fn ode_holds_across_periods() {
        for iota in [0.5, 1.0, 3.0, -2.0] {
            let e = WpEvaluator::new(iota).unwrap();
            for i in 0..200 {
                let w = -7.0 + 14.0 * (i as f64 + 0.5) / 200.0;
                if (w - e.nearest_pole(w)).abs() < 0.05 {
                    continue;
                }
                assert!(ode_residual(&e, w) < 1e-9, "iota={iota} w={w}");
            }
        }
    }

    #[test]
    fn second_derivative_identity() {
        let e = WpEvaluator::new(1.0).unwrap();
        let d = e.derivs(0.3, 4, DEFAULT_POLE_GUARD).unwrap();
        assert!((d[2] - 6.0 * d[0] * d[0]).abs() < 1e-12 * d[2].abs());
        assert!((d[3] - 12.0 * d[0] * d[1]).abs() < 1e-12 * d[3].abs());
        // P'''' = 12 P'^2 + 12 P P''
        let d4 = 12.0 * d[1] * d[1] + 12.0 * d[0] * d[2];
        assert!((d[4] - d4).abs() < 1e-12 * d4.abs());
    }

    #[test]
    fn duplication_matches_series() {
        let e = WpEvaluator::new(1.0).unwrap();
        let w = e.series_radius() * 0.45;
        let (p, dp) = e.series(w);
        let q = 3.0 * p * p / dp;
        let doubled = -2.0 * p + q * q;
        let direct = e.series(2.0 * w).0;
        assert!((doubled - direct).abs() < 1e-9 * direct.abs());
    }

    #[test]
    fn evenness() {
        let e = WpEvaluator::new(3.0).unwrap();
        for w in [0.2, 0.7, 1.3, 2.9] {
            let a = e.wp(w, DEFAULT_POLE_GUARD).unwrap();
            let b = e.wp(-w, DEFAULT_POLE_GUARD).unwrap();
            assert!((a.0 - b.0).abs() <= 1e-12 * a.0.abs());
            assert!((a.1 + b.1).abs() <= 1e-12 * a.1.abs().max(1e-300));
        }
    }

    #[test]
    fn pole_guard_and_degenerate_iota() {
        let e = WpEvaluator::new(1.0).unwrap();
        assert!(matches!(e.wp(0.0, DEFAULT_POLE_GUARD), Err(WpError::Pole { .. })));
        let p = e.period();
        match e.wp(p, DEFAULT_POLE_GUARD) {
            Err(WpError::Pole { pole, .. }) => assert!((pole - p).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert!(matches!(WpEvaluator::new(0.0), Err(WpError::DegenerateIota(_))));
    }

    #[test]
    fn half_period_scaling() {
        // omega(iota) = omega(1) * iota^(-1/6); omega(1) = Gamma(1/3)^3 / (2^(7/3) pi)
        let g13: f64 = 2.678_938_534_707_747_6;
        let omega1 = g13.powi(3) / (2f64.powf(7.0 / 3.0) * std::f64::consts::PI);
        let e = WpEvaluator::new(1.0).unwrap();
        assert!((e.half_period() - omega1).abs() < 1e-9, "{}", e.half_period());
        let e = WpEvaluator::new(3.0).unwrap();
        assert!((e.half_period() - omega1 * 3f64.powf(-1.0 / 6.0)).abs() < 1e-9);
    }
}
