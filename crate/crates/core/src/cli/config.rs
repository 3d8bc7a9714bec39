//! Run configuration: JSON schema, validation and family construction.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Deserialize;

use super::CliError;
use crate::families::{
    build_elliptic, build_kz2_blowup, build_kz2_poly, build_kz3_blowup, build_kz3_harmonic, build_sw_blowup,
    build_sw_poly, AlphaSpec, Equation, Family, Harmonic, Kz2Blowup, Kz2Poly, Kz3Blowup, Mode, SwBlowup, SwPoly,
    XPolySolution,
};
use crate::paramdsl::ParamFn;
use crate::verifier::{DEFAULT_POLE_GUARD, DEFAULT_TOLERANCE};

/// A parameter: an expression in `t`, a number, or the ascending
/// coefficient list of a polynomial in `eta` / `mu`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    Expr(String),
    Poly(Vec<ParamValue>),
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    pub iota: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub epsilon: Option<f64>,
    pub alpha0: Option<f64>,
    pub t0: Option<f64>,
    pub w1_re: Option<f64>,
    pub w1_im: Option<f64>,
}

impl Constants {
    fn entries(&self) -> [(&'static str, Option<f64>); 8] {
        [
            ("iota", self.iota),
            ("a", self.a),
            ("b", self.b),
            ("epsilon", self.epsilon),
            ("alpha0", self.alpha0),
            ("t0", self.t0),
            ("w1_re", self.w1_re),
            ("w1_im", self.w1_im),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub equation: String,
    pub family: String,
    #[serde(default)]
    pub k: Option<f64>,
    #[serde(default)]
    pub mode: Option<String>,
    /// Allows the formula mode of the 3-D blow-up family with `gamma2 != 0`.
    #[serde(default)]
    pub audit: bool,
    #[serde(default)]
    pub params: BTreeMap<String, ParamValue>,
    #[serde(default)]
    pub constants: Constants,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub pole_guard: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn cfg(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl Config {
    pub fn from_json(text: &str) -> Result<Config, CliError> {
        let c: Config = serde_json::from_str(text).map_err(|e| cfg(format!("invalid config: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or(DEFAULT_TOLERANCE)
    }

    pub fn pole_guard(&self) -> f64 {
        self.pole_guard.unwrap_or(DEFAULT_POLE_GUARD)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn family(&self) -> Result<Family, CliError> {
        Family::lookup(&self.equation, &self.family).ok_or_else(|| {
            if !["shortwave", "kz2d", "kz3d"].contains(&self.equation.as_str()) {
                cfg(format!("unknown equation `{}` (expected shortwave, kz2d or kz3d)", self.equation))
            } else {
                let kinds: Vec<&str> = Family::ALL
                    .iter()
                    .filter(|f| f.equation_name() == self.equation)
                    .map(|f| f.kind())
                    .collect();
                cfg(format!(
                    "unknown family `{}` for {} (expected {})",
                    self.family,
                    self.equation,
                    kinds.join(", ")
                ))
            }
        })
    }

    pub fn mode(&self) -> Result<Mode, CliError> {
        match &self.mode {
            None => Ok(Mode::Solver),
            Some(m) => Mode::from_name(m).ok_or_else(|| cfg(format!("unknown mode `{m}` (expected solver or formula)"))),
        }
    }

    pub fn equation(&self) -> Result<Equation, CliError> {
        match self.equation.as_str() {
            "shortwave" => Ok(Equation::Shortwave {
                k: self.k.ok_or_else(|| cfg("shortwave needs `k`"))?,
            }),
            "kz2d" => Ok(Equation::Kz2d),
            "kz3d" => Ok(Equation::Kz3d),
            e => Err(cfg(format!("unknown equation `{e}`"))),
        }
    }

    /// Structural checks: names, required entries, value ranges.
    pub fn validate(&self) -> Result<(), CliError> {
        let family = self.family()?;
        let mode = self.mode()?;
        self.equation()?;
        if let Some(k) = self.k {
            if self.equation != "shortwave" {
                return Err(cfg("`k` only applies to the shortwave equation"));
            }
            if !k.is_finite() {
                return Err(cfg("`k` must be finite"));
            }
        }
        if mode == Mode::Formula && !family.has_formula() {
            return Err(cfg(format!("{family} has no formula mode")));
        }
        if self.audit && family != Family::Kz3dBlowup {
            return Err(cfg("`audit` only applies to kz3d blowup"));
        }
        let req = family.required_params();
        let opt = family.optional_params();
        for name in self.params.keys() {
            if !req.contains(&name.as_str()) && !opt.contains(&name.as_str()) {
                let mut all: Vec<&str> = req.iter().chain(opt).copied().collect();
                all.sort_unstable();
                let list = if all.is_empty() { "none".to_string() } else { all.join(", ") };
                return Err(cfg(format!("unknown parameter `{name}` for {family} (accepted: {list})")));
            }
        }
        for name in req {
            if !self.params.contains_key(*name) {
                return Err(cfg(format!("{family} requires parameter `{name}`")));
            }
        }
        let creq = family.required_constants();
        let copt = family.optional_constants();
        for (name, v) in self.constants.entries() {
            match v {
                Some(_) if !creq.contains(&name) && !copt.contains(&name) => {
                    return Err(cfg(format!("constant `{name}` does not apply to {family}")));
                }
                Some(x) if !x.is_finite() => return Err(cfg(format!("constant `{name}` must be finite"))),
                None if creq.contains(&name) => return Err(cfg(format!("{family} requires constant `{name}`"))),
                _ => {}
            }
        }
        if let Some(e) = self.constants.epsilon {
            if e != 1.0 && e != -1.0 {
                return Err(cfg(format!("`epsilon` must be 1 or -1, got {e}")));
            }
        }
        for (name, v) in [("tolerance", self.tolerance), ("pole_guard", self.pole_guard)] {
            if let Some(x) = v {
                if !(x.is_finite() && x > 0.0) {
                    return Err(cfg(format!("`{name}` must be positive, got {x}")));
                }
            }
        }
        // parse everything once so syntax errors surface as config errors
        for (name, v) in &self.params {
            self.param_value(name, v)?;
        }
        Ok(())
    }

    fn param_value(&self, name: &str, v: &ParamValue) -> Result<Vec<ParamFn>, CliError> {
        let poly_var = match (self.family()?, name) {
            (Family::Kz3dBlowup, "sigma" | "kappa" | "omega") => Some("eta"),
            (Family::Kz3dHarmonic, _) => Some("mu"),
            _ => None,
        };
        let scalar = |v: &ParamValue| -> Result<ParamFn, CliError> {
            match v {
                ParamValue::Number(x) if x.is_finite() => Ok(ParamFn::constant(*x)),
                ParamValue::Number(x) => Err(cfg(format!("parameter `{name}`: {x} is not finite"))),
                ParamValue::Expr(s) => ParamFn::parse(s).map_err(|e| cfg(format!("parameter `{name}`: {e}"))),
                ParamValue::Poly(_) => Err(cfg(format!("parameter `{name}`: nested lists are not allowed"))),
            }
        };
        match (poly_var, v) {
            (None, ParamValue::Poly(_)) => Err(cfg(format!("parameter `{name}` must be a single expression in t"))),
            (None, v) => Ok(vec![scalar(v)?]),
            (Some(_), ParamValue::Poly(items)) => items.iter().map(scalar).collect(),
            (Some(_), ParamValue::Number(_)) => Ok(vec![scalar(v)?]),
            (Some(var), ParamValue::Expr(s)) => {
                let f = ParamFn::parse_with_var(s, var).map_err(|e| cfg(format!("parameter `{name}`: {e}")))?;
                let coeffs = f.poly_coeffs().ok_or_else(|| {
                    cfg(format!(
                        "parameter `{name}` must be polynomial in {var}; give t-dependent coefficients as a list"
                    ))
                })?;
                Ok(coeffs.iter().map(|&c| ParamFn::constant(c)).collect())
            }
        }
    }

    fn scalar(&self, name: &str) -> Result<ParamFn, CliError> {
        match self.params.get(name) {
            None => Ok(ParamFn::constant(0.0)),
            Some(v) => Ok(self.param_value(name, v)?.remove(0)),
        }
    }

    fn poly(&self, name: &str) -> Result<Vec<ParamFn>, CliError> {
        match self.params.get(name) {
            None => Ok(Vec::new()),
            Some(v) => self.param_value(name, v),
        }
    }

    /// Constructs the configured solution.
    pub fn build(&self) -> Result<XPolySolution, CliError> {
        let family = self.family()?;
        let mode = self.mode()?;
        let k = self.k.unwrap_or(0.0);
        let c = &self.constants;
        let p = |n: &str| self.scalar(n);
        let sol = match family {
            Family::ShortwaveBlowup => build_sw_blowup(
                &SwBlowup {
                    alpha: p("alpha")?,
                    beta: p("beta")?,
                    gamma: p("gamma")?,
                    sigma: p("sigma")?,
                    rho: p("rho")?,
                    theta: p("theta")?,
                    vartheta: p("vartheta")?,
                    ..SwBlowup::new(k)
                },
                mode,
            ),
            Family::ShortwavePolynomial => build_sw_poly(
                &SwPoly {
                    alpha: p("alpha")?,
                    beta: p("beta")?,
                    gamma: p("gamma")?,
                    sigma: p("sigma")?,
                    rho: p("rho")?,
                    tau: p("tau")?,
                    ..SwPoly::new(k)
                },
                mode,
            ),
            Family::Kz2dBlowup => build_kz2_blowup(
                &Kz2Blowup {
                    alpha: p("alpha")?,
                    beta: p("beta")?,
                    gamma: p("gamma")?,
                    sigma: p("sigma")?,
                    rho: p("rho")?,
                },
                mode,
            ),
            Family::Kz2dPolynomial => build_kz2_poly(
                &Kz2Poly {
                    alpha: p("alpha")?,
                    beta: p("beta")?,
                    gamma: p("gamma")?,
                    sigma: p("sigma")?,
                },
                mode,
            ),
            Family::Kz3dBlowup => {
                let alpha = match self.params.get("alpha") {
                    Some(_) => {
                        if c.epsilon.is_some() || c.alpha0.is_some() || c.t0.is_some() {
                            return Err(cfg(
                                "an explicit `alpha` replaces the angle integration; drop epsilon, alpha0 and t0",
                            ));
                        }
                        AlphaSpec::Explicit(p("alpha")?)
                    }
                    None => AlphaSpec::FromGamma2 {
                        epsilon: c.epsilon.unwrap_or(1.0),
                        t0: c.t0.unwrap_or(0.0),
                        alpha0: c.alpha0.unwrap_or(0.0),
                    },
                };
                build_kz3_blowup(
                    &Kz3Blowup {
                        gamma0: p("gamma0")?,
                        gamma1: p("gamma1")?,
                        gamma2: p("gamma2")?,
                        beta: p("beta")?,
                        sigma: self.poly("sigma")?,
                        kappa: self.poly("kappa")?,
                        omega: self.poly("omega")?,
                        alpha,
                        audit: self.audit,
                    },
                    mode,
                )
            }
            Family::Kz3dHarmonic => build_kz3_harmonic(
                &Harmonic {
                    sigma: self.poly("sigma")?,
                    rho: self.poly("rho")?,
                    kappa: self.poly("kappa")?,
                    omega: self.poly("omega")?,
                    w1: Complex64::new(c.w1_re.unwrap_or(0.0), c.w1_im.unwrap_or(0.0)),
                },
                mode,
            ),
            Family::ShortwaveElliptic | Family::Kz2dElliptic | Family::Kz3dElliptic => build_elliptic(
                self.equation()?,
                c.iota.unwrap_or(0.0),
                c.a.unwrap_or(1.0),
                c.b.unwrap_or(0.0),
            ),
        };
        sol.map_err(CliError::Build)
    }
}
