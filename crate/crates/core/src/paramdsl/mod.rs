//! Parameter functions of one real variable: parsing, printing, evaluation
//! with derivatives, and complex evaluation of polynomials.

mod expr;
mod parse;

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::jet::{Coord, Jet, JetError, OrderBox};

pub use expr::{Expr, Func};
pub use parse::{parse_expr, ParseError, ParseErrorKind};

/// Highest derivative order `eval_jet` will produce.
pub const ORDER_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{op} is undefined for `{subexpr}` = {value}")]
    Domain {
        subexpr: String,
        op: &'static str,
        value: f64,
    },
    #[error("division by zero: `{subexpr}` vanishes")]
    DivisionByZero { subexpr: String },
    #[error("derivative order {requested} exceeds the cap {cap}")]
    OrderCap { requested: usize, cap: usize },
    #[error("`{0}` is not a polynomial")]
    NotPolynomial(String),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// A parsed parameter function.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamFn {
    root: Expr,
    source_text: String,
    var: String,
    poly: Option<Vec<f64>>,
}

impl ParamFn {
    /// Parses an expression in the variable `t`.
    pub fn parse(src: &str) -> Result<ParamFn, ParseError> {
        Self::parse_with_var(src, "t")
    }

    pub fn parse_with_var(src: &str, var: &str) -> Result<ParamFn, ParseError> {
        let root = parse_expr(src, var)?;
        Ok(Self::from_expr(root, src, var))
    }

    pub fn from_expr(root: Expr, source_text: &str, var: &str) -> ParamFn {
        let poly = root.poly_coeffs();
        ParamFn {
            root,
            source_text: source_text.to_string(),
            var: var.to_string(),
            poly,
        }
    }

    pub fn constant(v: f64) -> ParamFn {
        let e = Expr::Const(v);
        let text = e.render("t");
        Self::from_expr(e, &text, "t")
    }

    pub fn root(&self) -> &Expr {
        &self.root
    }

    pub fn source_text(&self) -> &str {
        &self.source_text
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn is_polynomial(&self) -> bool {
        self.poly.is_some()
    }

    /// Exact degree for polynomials (the zero polynomial has degree 0).
    pub fn poly_degree(&self) -> Option<usize> {
        self.poly.as_ref().map(|c| c.len() - 1)
    }

    /// Ascending coefficients for polynomials.
    pub fn poly_coeffs(&self) -> Option<&[f64]> {
        self.poly.as_deref()
    }

    /// Whether the function is identically zero.
    pub fn is_zero(&self) -> bool {
        matches!(self.poly.as_deref(), Some([c]) if *c == 0.0)
    }

    pub fn eval(&self, v: f64) -> Result<f64, EvalError> {
        self.root.eval_in(v, &self.var)
    }

    /// Values `f(t0), f'(t0), ..., f^(order)(t0)`.
    pub fn eval_jet(&self, t0: f64, order: usize) -> Result<Vec<f64>, EvalError> {
        if order > ORDER_CAP {
            return Err(EvalError::OrderCap {
                requested: order,
                cap: ORDER_CAP,
            });
        }
        let seed = Jet::lift(t0, Coord::T, OrderBox::univariate(order as u8));
        Ok(self.compose(&seed)?.derivs_along(Coord::T))
    }

    /// Substitutes an arbitrary jet for the variable.
    pub fn compose(&self, arg: &Jet) -> Result<Jet, EvalError> {
        self.root.eval_jet(arg, &self.var)
    }

    pub fn compose_complex(&self, arg: &Jet<Complex64>) -> Result<Jet<Complex64>, EvalError> {
        self.root.eval_jet(arg, &self.var)
    }

    /// Exact value at a complex argument; polynomials only.
    pub fn eval_complex(&self, z: Complex64) -> Result<Complex64, EvalError> {
        if self.poly.is_none() {
            return Err(EvalError::NotPolynomial(self.to_string()));
        }
        self.root
            .eval_complex(z)
            .ok_or_else(|| EvalError::NotPolynomial(self.to_string()))
    }
}

impl fmt::Display for ParamFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.root.render(&self.var))
    }
}
