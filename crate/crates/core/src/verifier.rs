//! Residual checks of constructed solutions: the governing PDE and the
//! coefficient system from one jet evaluation per point, finite-difference
//! cross-checks of the jets, and formula-vs-solver comparison.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::families::{Equation, FieldError, Frame, XPolySolution};
use crate::jet::{Jet, OrderBox};

/// Default distance from the singular set, in the frame variable.
pub const DEFAULT_POLE_GUARD: f64 = 1e-2;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_FD_STEP: f64 = 1e-3;
pub const FD_TOLERANCE: f64 = 1e-6;
/// Environment variable overriding the worker count.
pub const THREADS_ENV: &str = "STABLERANGE_THREADS";
const REDRAW_FACTOR: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("only {accepted} of {requested} sample points lie outside the pole guard after {draws} draws")]
    SamplingExhausted {
        accepted: usize,
        requested: usize,
        draws: usize,
    },
    #[error("finite-difference stencil of half-width {step} would reach the singular set (distance {distance})")]
    StencilCrossesPole { step: f64, distance: f64 },
    #[error("solutions differ in equation or frame")]
    FrameMismatch,
    #[error("invalid sample box: {0}")]
    InvalidBox(String),
    #[error("invalid {THREADS_ENV}: {0}")]
    Threads(String),
}

/// Anything that can be evaluated as a jet of `u`.
pub trait Field: Sync {
    fn equation(&self) -> Equation;
    fn eval_jet(&self, p: [f64; 4], orders: OrderBox, guard: f64) -> Result<Jet, FieldError>;
    /// Distance to the singular set in the guarded variable.
    fn guard_distance(&self, p: [f64; 4]) -> Result<f64, FieldError>;
}

impl Field for XPolySolution {
    fn equation(&self) -> Equation {
        XPolySolution::equation(self)
    }

    fn eval_jet(&self, p: [f64; 4], orders: OrderBox, guard: f64) -> Result<Jet, FieldError> {
        XPolySolution::eval_jet(self, p, orders, guard)
    }

    fn guard_distance(&self, p: [f64; 4]) -> Result<f64, FieldError> {
        XPolySolution::guard_distance(self, p)
    }
}

/// `u + eps*y^power`; used to check that residuals notice perturbations.
pub struct Perturbed<'a, F: Field> {
    pub inner: &'a F,
    pub eps: f64,
    pub power: i32,
}

impl<F: Field> Field for Perturbed<'_, F> {
    fn equation(&self) -> Equation {
        self.inner.equation()
    }

    fn eval_jet(&self, p: [f64; 4], orders: OrderBox, guard: f64) -> Result<Jet, FieldError> {
        let u = self.inner.eval_jet(p, orders, guard)?;
        let y = Jet::lift(p[2], crate::jet::Coord::Y, orders);
        Ok(&u + &y.powi(self.power)?.scale(self.eps))
    }

    fn guard_distance(&self, p: [f64; 4]) -> Result<f64, FieldError> {
        self.inner.guard_distance(p)
    }
}

/// A residual and the magnitude it is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    pub value: f64,
    /// Largest absolute value among the individual terms.
    pub scale: f64,
}

impl Residual {
    fn from_terms(terms: &[f64]) -> Residual {
        Residual {
            value: terms.iter().sum(),
            scale: terms.iter().fold(0.0, |m: f64, t| m.max(t.abs())),
        }
    }

    pub fn relative(&self) -> f64 {
        let r = self.value.abs() / self.scale.max(1e-300);
        if r.is_nan() {
            f64::INFINITY
        } else {
            r
        }
    }
}

/// Terms of the left-hand side at `x` from a jet of `u` in the residual box.
fn pde_terms(eq: Equation, x: f64, u: &Jet) -> Vec<f64> {
    let d = |i: [u8; 4]| u.partial(i).expect("residual box");
    let (u0, ux, uxx, uyy) = (u.value(), d([0, 1, 0, 0]), d([0, 2, 0, 0]), d([0, 0, 2, 0]));
    let utx = d([1, 1, 0, 0]);
    match eq {
        Equation::Shortwave { k } => vec![2.0 * utx, -2.0 * (x + ux) * uxx, uyy, 2.0 * k * ux],
        Equation::Kz2d => vec![2.0 * utx, ux * ux, u0 * uxx, -uyy],
        Equation::Kz3d => vec![2.0 * utx, ux * ux, u0 * uxx, -uyy, -d([0, 0, 0, 2])],
    }
}

/// Left-hand side of the governing equation at `p = (t, x, y, z)`.
pub fn residual_pde<F: Field + ?Sized>(u: &F, p: [f64; 4], guard: f64) -> Result<Residual, VerifyError> {
    let eq = u.equation();
    let j = u.eval_jet(p, eq.residual_box(), guard)?;
    Ok(Residual::from_terms(&pde_terms(eq, p[1], &j)))
}

/// Residuals of the coefficient system from jets of `C_0..C_3` (box with
/// `t:1`, `y:2` and `z:2` when the equation has `z`), highest equation first.
pub fn coeff_system_residual(eq: Equation, c: &[Jet]) -> Vec<Residual> {
    let d = |m: usize, i: [u8; 4]| c[m].partial(i).expect("coefficient box");
    let lap = |m: usize| {
        let mut v = vec![d(m, [0, 0, 2, 0])];
        if eq.has_z() {
            v.push(d(m, [0, 0, 0, 2]));
        }
        v
    };
    let v = |m: usize| c[m].value();
    let dt = |m: usize| d(m, [1, 0, 0, 0]);
    let with = |mut l: Vec<f64>, rest: &[f64]| {
        l.extend_from_slice(rest);
        Residual::from_terms(&l)
    };
    match eq {
        Equation::Shortwave { k } => {
            let (g, h, xi) = (v(1), v(2), v(3));
            vec![
                with(lap(3), &[-36.0 * xi * xi]),
                with(lap(2), &[-36.0 * xi * h, -(2.0 - k) * 6.0 * xi, 6.0 * dt(3)]),
                with(
                    lap(1),
                    &[-8.0 * h * h, -4.0 * (1.0 - k) * h, -12.0 * xi * g, 4.0 * dt(2)],
                ),
                with(lap(0), &[-4.0 * g * h, 2.0 * dt(1), 2.0 * k * g]),
            ]
        }
        Equation::Kz2d | Equation::Kz3d => {
            let (f, g, xi) = (v(0), v(1), v(2));
            vec![
                with(lap(2), &[-6.0 * xi * xi]),
                with(lap(1), &[-6.0 * g * xi, -4.0 * dt(2)]),
                with(lap(0), &[-2.0 * f * xi, -2.0 * dt(1), -g * g]),
            ]
        }
    }
}

/// Coefficient-system residuals of `u` at `(t, y, z)`.
pub fn residual_coeff_system(
    u: &XPolySolution,
    t: f64,
    y: f64,
    z: f64,
    guard: f64,
) -> Result<Vec<Residual>, VerifyError> {
    let eq = u.equation();
    let orders = OrderBox::new(1, 0, 2, if eq.has_z() { 2 } else { 0 });
    let c = u.coeff_jets(t, y, z, orders, guard)?;
    Ok(coeff_system_residual(eq, &c))
}

/// Worst relative deviation between the jet partials used by the residual
/// and central differences with one Richardson level, measured against the
/// largest of those partials at the point (floored at 1).
///
/// The step is `h`, shrunk to `distance/128` near the singular set so the
/// stencil stays in the region where the truncation error is controlled.
/// Points inside the pole guard are rejected.
pub fn fd_crosscheck<F: Field + ?Sized>(u: &F, p: [f64; 4], h: f64, guard: f64) -> Result<f64, VerifyError> {
    let eq = u.equation();
    let dist = u.guard_distance(p)?;
    if !(dist >= guard && dist > 0.0) {
        return Err(VerifyError::StencilCrossesPole {
            step: h,
            distance: dist,
        });
    }
    let h = h.min(dist / 128.0);
    let guard = guard.min(0.5 * dist);
    let jet = u.eval_jet(p, eq.residual_box(), guard)?;
    let f = |dp: [f64; 4]| -> Result<f64, VerifyError> {
        let q = [p[0] + dp[0], p[1] + dp[1], p[2] + dp[2], p[3] + dp[3]];
        Ok(u.eval_jet(q, OrderBox::SCALAR, guard)?.value())
    };
    let unit = |i: usize, s: f64| {
        let mut d = [0.0; 4];
        d[i] = s;
        d
    };
    let first = |i: usize, s: f64| -> Result<f64, VerifyError> { Ok((f(unit(i, s))? - f(unit(i, -s))?) / (2.0 * s)) };
    let second = |i: usize, s: f64| -> Result<f64, VerifyError> {
        Ok((f(unit(i, s))? - 2.0 * f([0.0; 4])? + f(unit(i, -s))?) / (s * s))
    };
    let mixed = |s: f64| -> Result<f64, VerifyError> {
        Ok((f([s, s, 0.0, 0.0])? - f([s, -s, 0.0, 0.0])? - f([-s, s, 0.0, 0.0])? + f([-s, -s, 0.0, 0.0])?)
            / (4.0 * s * s))
    };
    let rich = |d: &dyn Fn(f64) -> Result<f64, VerifyError>| -> Result<f64, VerifyError> {
        Ok((4.0 * d(h / 2.0)? - d(h)?) / 3.0)
    };
    let mut checks = vec![
        ([0, 1, 0, 0], rich(&|s| first(1, s))?),
        ([0, 2, 0, 0], rich(&|s| second(1, s))?),
        ([0, 0, 2, 0], rich(&|s| second(2, s))?),
        ([1, 1, 0, 0], rich(&mixed)?),
    ];
    if eq.has_z() {
        checks.push(([0, 0, 0, 2], rich(&|s| second(3, s))?));
    }
    let scale = checks
        .iter()
        .map(|(i, _)| jet.partial(*i).expect("residual box").abs())
        .fold(1.0f64, f64::max);
    let mut worst = 0.0f64;
    for (i, fd) in checks {
        let dev = (fd - jet.partial(i).expect("residual box")).abs() / scale;
        worst = worst.max(if dev.is_nan() { f64::INFINITY } else { dev });
    }
    Ok(worst)
}

/// Axis-aligned sampling box; `z` is ignored for two-variable equations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleBox {
    pub t: (f64, f64),
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub z: (f64, f64),
}

impl SampleBox {
    pub fn new(t: (f64, f64), x: (f64, f64), y: (f64, f64), z: (f64, f64)) -> Result<SampleBox, VerifyError> {
        for (name, (lo, hi)) in [("t", t), ("x", x), ("y", y), ("z", z)] {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(VerifyError::InvalidBox(format!("{name} range {lo}..{hi}")));
            }
        }
        Ok(SampleBox { t, x, y, z })
    }

    fn draw(&self, rng: &mut ChaCha8Rng, has_z: bool) -> [f64; 4] {
        let mut u = |(lo, hi): (f64, f64)| if lo == hi { lo } else { rng.random_range(lo..hi) };
        let t = u(self.t);
        let x = u(self.x);
        let y = u(self.y);
        let z = if has_z { u(self.z) } else { 0.0 };
        [t, x, y, z]
    }
}

/// `n` seeded uniform points of `b` at least `guard` away from the singular
/// set, redrawing rejected points within a budget of `10 n` draws.
pub fn sample_points<F: Field + ?Sized>(
    u: &F,
    b: &SampleBox,
    n: usize,
    seed: u64,
    guard: f64,
) -> Result<Vec<[f64; 4]>, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let has_z = u.equation().has_z();
    let budget = REDRAW_FACTOR * n.max(1);
    let mut out = Vec::with_capacity(n);
    let mut draws = 0;
    while out.len() < n {
        if draws == budget {
            return Err(VerifyError::SamplingExhausted {
                accepted: out.len(),
                requested: n,
                draws,
            });
        }
        draws += 1;
        let p = b.draw(&mut rng, has_z);
        if matches!(u.guard_distance(p), Ok(d) if d >= guard) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Worker pool sized by `STABLERANGE_THREADS`, or the number of logical CPUs.
pub fn thread_pool() -> Result<rayon::ThreadPool, VerifyError> {
    let n = match std::env::var(THREADS_ENV) {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => n,
            _ => return Err(VerifyError::Threads(format!("expected a positive integer, got `{s}`"))),
        },
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| VerifyError::Threads(e.to_string()))
}

fn point_vec(p: [f64; 4], has_z: bool) -> Vec<f64> {
    if has_z {
        p.to_vec()
    } else {
        p[..3].to_vec()
    }
}

/// Per-point detail kept in a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointRecord {
    pub point: Vec<f64>,
    pub residual: f64,
    pub scale: f64,
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoeffSystemSummary {
    pub max_rel_residual: f64,
    pub worst_point: Vec<f64>,
    pub worst_equation: usize,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FdSummary {
    pub step: f64,
    pub checked: usize,
    /// Points skipped because the stencil would reach the singular set.
    pub skipped: usize,
    pub max_deviation: f64,
    pub worst_point: Vec<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

/// Outcome of a seeded residual verification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub family: String,
    pub equation: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    pub mode: String,
    pub samples: usize,
    pub seed: u64,
    pub pole_guard: f64,
    pub sample_box: SampleBox,
    pub tolerance: f64,
    pub max_abs_residual: f64,
    pub max_rel_residual: f64,
    pub worst_point: Vec<f64>,
    /// `max_rel_residual <= tolerance`.
    pub pass: bool,
    pub coeff_system: CoeffSystemSummary,
    pub finite_difference: FdSummary,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<PointRecord>,
}

impl ResidualReport {
    /// PDE, coefficient system and finite differences all within tolerance.
    pub fn all_pass(&self) -> bool {
        self.pass && self.coeff_system.pass && self.finite_difference.pass
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub pole_guard: f64,
    pub sample_box: SampleBox,
    pub fd_step: f64,
    /// How many per-point records to keep, in sample order.
    pub record_points: usize,
}

/// Index and value of the first maximum; NaN counts as infinite.
fn argmax(v: impl Iterator<Item = f64>) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, x) in v.enumerate() {
        let x = if x.is_nan() { f64::INFINITY } else { x };
        if x > best.1 {
            best = (i, x);
        }
    }
    best
}

/// Samples points and runs the PDE residual, the coefficient-system residual
/// and the finite-difference cross-check on each, in parallel.
pub fn verify(u: &XPolySolution, o: &VerifyOptions) -> Result<ResidualReport, VerifyError> {
    let pts = sample_points(u, &o.sample_box, o.samples, o.seed, o.pole_guard)?;
    let has_z = u.equation().has_z();
    let pool = thread_pool()?;
    type PointOut = (Residual, (usize, f64), Option<f64>);
    let results: Vec<Result<PointOut, VerifyError>> = pool.install(|| {
        pts.par_iter()
            .map(|&p| {
                let r = residual_pde(u, p, o.pole_guard)?;
                let cs = residual_coeff_system(u, p[0], p[2], p[3], o.pole_guard)?;
                let cw = argmax(cs.iter().map(Residual::relative));
                let fd = match fd_crosscheck(u, p, o.fd_step, o.pole_guard) {
                    Ok(d) => Some(d),
                    Err(VerifyError::StencilCrossesPole { .. }) => None,
                    Err(e) => return Err(e),
                };
                Ok((r, cw, fd))
            })
            .collect()
    });
    let results = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let (wi, max_rel) = argmax(results.iter().map(|r| r.0.relative()));
    let max_abs = results.iter().fold(0.0f64, |m, r| m.max(r.0.value.abs()));
    let (ci, cmax) = argmax(results.iter().map(|r| r.1 .1));
    let (fi, fmax) = argmax(results.iter().map(|r| r.2.unwrap_or(0.0)));
    let checked = results.iter().filter(|r| r.2.is_some()).count();
    let nz = |x: f64| if x == f64::NEG_INFINITY { 0.0 } else { x };
    let (max_rel, cmax, fmax) = (nz(max_rel), nz(cmax), nz(fmax));
    let worst = |i: usize| pts.get(i).map(|&p| point_vec(p, has_z)).unwrap_or_default();
    let points = pts
        .iter()
        .zip(&results)
        .take(o.record_points)
        .map(|(&p, r)| PointRecord {
            point: point_vec(p, has_z),
            residual: r.0.value,
            scale: r.0.scale,
            relative: r.0.relative(),
        })
        .collect();
    let eq = u.equation();
    Ok(ResidualReport {
        family: u.family().name(),
        equation: eq.name().to_string(),
        k: match eq {
            Equation::Shortwave { k } => Some(k),
            _ => None,
        },
        mode: u.mode().name().to_string(),
        samples: pts.len(),
        seed: o.seed,
        pole_guard: o.pole_guard,
        sample_box: o.sample_box,
        tolerance: o.tolerance,
        max_abs_residual: max_abs,
        max_rel_residual: max_rel,
        worst_point: worst(wi),
        pass: max_rel <= o.tolerance,
        coeff_system: CoeffSystemSummary {
            max_rel_residual: cmax,
            worst_point: worst(ci),
            worst_equation: results.get(ci).map(|r| r.1 .0).unwrap_or(0),
            tolerance: o.tolerance,
            pass: cmax <= o.tolerance,
        },
        finite_difference: FdSummary {
            step: o.fd_step,
            checked,
            skipped: results.len() - checked,
            max_deviation: fmax,
            worst_point: if checked > 0 { worst(fi) } else { Vec::new() },
            tolerance: FD_TOLERANCE,
            pass: fmax <= FD_TOLERANCE,
        },
        points,
    })
}

/// Largest difference between two solutions over common sample points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeComparison {
    pub samples: usize,
    pub max_abs_diff: f64,
    /// Difference relative to `max(|a|, |b|, 1)`.
    pub max_rel_diff: f64,
    pub worst_point: Vec<f64>,
}

/// Compares `a` and `b` at `n` seeded points of `b0` off both singular sets.
pub fn compare_modes(
    a: &XPolySolution,
    b: &XPolySolution,
    b0: &SampleBox,
    n: usize,
    seed: u64,
    guard: f64,
) -> Result<ModeComparison, VerifyError> {
    if a.equation() != b.equation() || !same_frame(a, b, b0)? {
        return Err(VerifyError::FrameMismatch);
    }
    struct Both<'a>(&'a XPolySolution, &'a XPolySolution);
    impl Field for Both<'_> {
        fn equation(&self) -> Equation {
            self.0.equation()
        }
        fn eval_jet(&self, p: [f64; 4], orders: OrderBox, guard: f64) -> Result<Jet, FieldError> {
            self.0.eval_jet(p, orders, guard)
        }
        fn guard_distance(&self, p: [f64; 4]) -> Result<f64, FieldError> {
            Ok(self.0.guard_distance(p)?.min(self.1.guard_distance(p)?))
        }
    }
    let pts = sample_points(&Both(a, b), b0, n, seed, guard)?;
    let pool = thread_pool()?;
    let diffs: Vec<Result<(f64, f64), VerifyError>> = pool.install(|| {
        pts.par_iter()
            .map(|&p| {
                let (ua, ub) = (a.eval(p, guard)?, b.eval(p, guard)?);
                let d = (ua - ub).abs();
                Ok((d, d / ua.abs().max(ub.abs()).max(1.0)))
            })
            .collect()
    });
    let diffs = diffs.into_iter().collect::<Result<Vec<_>, _>>()?;
    let (wi, max_abs) = argmax(diffs.iter().map(|d| d.0));
    let (_, max_rel) = argmax(diffs.iter().map(|d| d.1));
    Ok(ModeComparison {
        samples: pts.len(),
        max_abs_diff: max_abs.max(0.0),
        max_rel_diff: max_rel.max(0.0),
        worst_point: pts
            .get(wi)
            .map(|&p| point_vec(p, a.equation().has_z()))
            .unwrap_or_default(),
    })
}

/// Frames match when they have the same kind and the singular sets agree at
/// the ends and middle of the time range; parameter tables may differ.
fn same_frame(a: &XPolySolution, b: &XPolySolution, b0: &SampleBox) -> Result<bool, VerifyError> {
    let kind = |f: Option<&Frame>| match f {
        None => 0.0,
        Some(Frame::Line { scale, .. }) => *scale,
        Some(Frame::Plane { .. }) => -1.0,
    };
    if kind(a.frame()) != kind(b.frame()) {
        return Ok(false);
    }
    for t in [b0.t.0, 0.5 * (b0.t.0 + b0.t.1), b0.t.1] {
        if a.surface(t)? != b.surface(t)? {
            return Ok(false);
        }
    }
    Ok(true)
}
