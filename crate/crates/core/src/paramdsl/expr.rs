use std::fmt::Write as _;

use num_complex::Complex64;

use super::EvalError;
use crate::jet::{Jet, JetError, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }
}

/// Expression tree of a function of one real variable.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Func(Func, Box<Expr>),
}

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(..) | Expr::Var | Expr::Func(..) => 5,
        }
    }

    /// Renders the tree with minimal parentheses; the output re-parses to
    /// the same tree.
    pub fn render(&self, var: &str) -> String {
        let mut s = String::new();
        self.write(&mut s, var);
        s
    }

    fn write_child(&self, out: &mut String, var: &str, min_prec: u8) {
        if self.precedence() < min_prec {
            out.push('(');
            self.write(out, var);
            out.push(')');
        } else {
            self.write(out, var);
        }
    }

    fn write(&self, out: &mut String, var: &str) {
        match self {
            Expr::Const(v) => {
                // Debug gives the shortest round-trip form
                let _ = write!(out, "{v:?}");
            }
            Expr::Var => out.push_str(var),
            Expr::Neg(a) => {
                out.push('-');
                a.write_child(out, var, 3);
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                a.write_child(out, var, 1);
                out.push_str(if matches!(self, Expr::Add(..)) { " + " } else { " - " });
                b.write_child(out, var, 2);
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.write_child(out, var, 2);
                out.push_str(if matches!(self, Expr::Mul(..)) { "*" } else { "/" });
                b.write_child(out, var, 3);
            }
            Expr::Pow(a, n) => {
                a.write_child(out, var, 5);
                let _ = write!(out, "^{n}");
            }
            Expr::Func(f, a) => {
                out.push_str(f.name());
                out.push('(');
                a.write(out, var);
                out.push(')');
            }
        }
    }

    pub fn eval(&self, v: f64) -> Result<f64, EvalError> {
        self.eval_in(v, "t")
    }

    pub(crate) fn eval_in(&self, v: f64, var: &str) -> Result<f64, EvalError> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var => v,
            Expr::Neg(a) => -a.eval_in(v, var)?,
            Expr::Add(a, b) => a.eval_in(v, var)? + b.eval_in(v, var)?,
            Expr::Sub(a, b) => a.eval_in(v, var)? - b.eval_in(v, var)?,
            Expr::Mul(a, b) => a.eval_in(v, var)? * b.eval_in(v, var)?,
            Expr::Div(a, b) => {
                let d = b.eval_in(v, var)?;
                if d == 0.0 {
                    return Err(EvalError::DivisionByZero {
                        subexpr: b.render(var),
                    });
                }
                a.eval_in(v, var)? / d
            }
            Expr::Pow(a, n) => {
                let base = a.eval_in(v, var)?;
                if base == 0.0 && *n < 0 {
                    return Err(EvalError::DivisionByZero {
                        subexpr: a.render(var),
                    });
                }
                base.powi(*n)
            }
            Expr::Func(f, a) => {
                let x = a.eval_in(v, var)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Ln | Func::Sqrt => {
                        if x <= 0.0 && !(x == 0.0 && *f == Func::Sqrt) {
                            return Err(EvalError::Domain {
                                subexpr: self.render(var),
                                op: f.name(),
                                value: x,
                            });
                        }
                        if *f == Func::Ln {
                            x.ln()
                        } else {
                            x.sqrt()
                        }
                    }
                }
            }
        })
    }

    /// Evaluates the tree with `arg` substituted for the variable.
    pub fn eval_jet<S: Scalar>(&self, arg: &Jet<S>, var: &str) -> Result<Jet<S>, EvalError> {
        let wrap = |e: JetError, node: &Expr| match e {
            JetError::DivisionByZero => EvalError::DivisionByZero {
                subexpr: node.render(var),
            },
            JetError::Domain { op, value } => EvalError::Domain {
                subexpr: node.render(var),
                op,
                value,
            },
            other => EvalError::Jet(other),
        };
        Ok(match self {
            Expr::Const(c) => Jet::constant(S::from_f64(*c), arg.orders()),
            Expr::Var => arg.clone(),
            Expr::Neg(a) => -&a.eval_jet(arg, var)?,
            Expr::Add(a, b) => &a.eval_jet(arg, var)? + &b.eval_jet(arg, var)?,
            Expr::Sub(a, b) => &a.eval_jet(arg, var)? - &b.eval_jet(arg, var)?,
            Expr::Mul(a, b) => &a.eval_jet(arg, var)? * &b.eval_jet(arg, var)?,
            Expr::Div(a, b) => {
                let d = b.eval_jet(arg, var)?;
                let r = d.recip().map_err(|e| wrap(e, b))?;
                &a.eval_jet(arg, var)? * &r
            }
            Expr::Pow(a, n) => a.eval_jet(arg, var)?.powi(*n).map_err(|e| wrap(e, a))?,
            Expr::Func(f, a) => {
                let x = a.eval_jet(arg, var)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Ln => x.ln().map_err(|e| wrap(e, self))?,
                    Func::Sqrt => x.sqrt().map_err(|e| wrap(e, self))?,
                }
            }
        })
    }

    /// Exact complex evaluation for polynomial trees.
    pub fn eval_complex(&self, z: Complex64) -> Option<Complex64> {
        Some(match self {
            Expr::Const(c) => Complex64::new(*c, 0.0),
            Expr::Var => z,
            Expr::Neg(a) => -a.eval_complex(z)?,
            Expr::Add(a, b) => a.eval_complex(z)? + b.eval_complex(z)?,
            Expr::Sub(a, b) => a.eval_complex(z)? - b.eval_complex(z)?,
            Expr::Mul(a, b) => a.eval_complex(z)? * b.eval_complex(z)?,
            Expr::Pow(a, n) if *n >= 0 => pow_by_squaring(a.eval_complex(z)?, *n as u32),
            _ => return None,
        })
    }

    pub fn is_polynomial(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var => true,
            Expr::Neg(a) => a.is_polynomial(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.is_polynomial() && b.is_polynomial()
            }
            Expr::Pow(a, n) => *n >= 0 && a.is_polynomial(),
            Expr::Div(..) | Expr::Func(..) => false,
        }
    }

    /// Coefficients in ascending degree, trailing zeros trimmed; `None` for
    /// non-polynomial trees.
    pub fn poly_coeffs(&self) -> Option<Vec<f64>> {
        fn trim(mut v: Vec<f64>) -> Vec<f64> {
            while v.len() > 1 && *v.last().unwrap() == 0.0 {
                v.pop();
            }
            v
        }
        fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
            let mut out = vec![0.0; a.len() + b.len() - 1];
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    out[i + j] += x * y;
                }
            }
            out
        }
        fn add(a: &[f64], b: &[f64], sign: f64) -> Vec<f64> {
            let mut out = vec![0.0; a.len().max(b.len())];
            for (i, x) in a.iter().enumerate() {
                out[i] += x;
            }
            for (i, y) in b.iter().enumerate() {
                out[i] += sign * y;
            }
            out
        }
        Some(trim(match self {
            Expr::Const(c) => vec![*c],
            Expr::Var => vec![0.0, 1.0],
            Expr::Neg(a) => a.poly_coeffs()?.iter().map(|c| -c).collect(),
            Expr::Add(a, b) => add(&a.poly_coeffs()?, &b.poly_coeffs()?, 1.0),
            Expr::Sub(a, b) => add(&a.poly_coeffs()?, &b.poly_coeffs()?, -1.0),
            Expr::Mul(a, b) => mul(&a.poly_coeffs()?, &b.poly_coeffs()?),
            Expr::Pow(a, n) if *n >= 0 => {
                let base = a.poly_coeffs()?;
                let mut acc = vec![1.0];
                for _ in 0..*n {
                    acc = mul(&acc, &base);
                }
                acc
            }
            _ => return None,
        }))
    }
}

// Same multiplication order as `Jet::powi`, so real arguments reproduce the
// jet value bit for bit.
fn pow_by_squaring(base: Complex64, mut e: u32) -> Complex64 {
    if e == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut acc: Option<Complex64> = None;
    let mut sq = base;
    while e > 0 {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => sq,
                Some(a) => a * sq,
            });
        }
        e >>= 1;
        if e > 0 {
            sq = sq * sq;
        }
    }
    acc.unwrap()
}
